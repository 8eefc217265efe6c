#include "qagame/corpus.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

std::string make_paragraph_id(std::string_view page_id, std::size_t ordinal) {
    std::string id(page_id);
    id.push_back('#');
    id += std::to_string(ordinal);
    return id;
}

Corpus Corpus::from_pages(std::vector<PageRecord> records) {
    Corpus corpus;
    corpus.pages_.reserve(records.size());
    for (std::size_t line = 0; line < records.size(); ++line) {
        auto& rec = records[line];
        if (rec.page_id.empty()) throw LoadError("empty page_id", line + 1);
        if (corpus.page_index_.contains(rec.page_id)) {
            throw LoadError("duplicate page_id \"" + rec.page_id + "\"", line + 1);
        }
        if (rec.paragraphs.empty()) {
            throw LoadError("page \"" + rec.page_id + "\" has no paragraphs", line + 1);
        }
        Page page;
        page.page_id = rec.page_id;
        page.title = std::move(rec.title);
        for (std::size_t ord = 0; ord < rec.paragraphs.size(); ++ord) {
            if (is_blank(rec.paragraphs[ord])) {
                throw LoadError("blank paragraph " + std::to_string(ord) + " in page \"" + rec.page_id + "\"",
                                line + 1);
            }
            Paragraph para{make_paragraph_id(rec.page_id, ord), std::move(rec.paragraphs[ord]), rec.page_id, ord};
            if (!corpus.paragraph_index_.emplace(para.paragraph_id, corpus.paragraphs_.size()).second) {
                throw LoadError("duplicate paragraph id \"" + para.paragraph_id + "\"", line + 1);
            }
            page.paragraphs.push_back(para.paragraph_id);
            corpus.paragraphs_.push_back(std::move(para));
        }
        for (auto& [anchor, target] : rec.links) {
            page.links.push_back({std::move(anchor), std::move(target), false});
        }
        corpus.page_index_.emplace(page.page_id, corpus.pages_.size());
        corpus.pages_.push_back(std::move(page));
    }

    for (auto& page : corpus.pages_) {
        for (auto& link : page.links) {
            link.dangling = !corpus.page_index_.contains(link.target);
            if (link.dangling) ++corpus.dangling_links_;
        }
    }

    std::size_t total = 0;
    corpus.token_counts_.reserve(corpus.paragraphs_.size());
    for (const auto& para : corpus.paragraphs_) {
        std::size_t n = tokenize(para.text).size();
        corpus.token_counts_.push_back(n);
        total += n;
    }
    if (!corpus.paragraphs_.empty()) {
        corpus.avgdl_ = static_cast<double>(total) / static_cast<double>(corpus.paragraphs_.size());
    }
    return corpus;
}

const Page* Corpus::find_page(std::string_view page_id) const {
    auto it = page_index_.find(std::string(page_id));
    return it == page_index_.end() ? nullptr : &pages_[it->second];
}

const Paragraph* Corpus::find_paragraph(std::string_view paragraph_id) const {
    auto it = paragraph_index_.find(std::string(paragraph_id));
    return it == paragraph_index_.end() ? nullptr : &paragraphs_[it->second];
}

const Paragraph& Corpus::get_paragraph(std::string_view paragraph_id) const {
    if (const auto* p = find_paragraph(paragraph_id)) return *p;
    throw NotFound("unknown paragraph \"" + std::string(paragraph_id) + "\"");
}

const Page& Corpus::get_page(std::string_view page_id) const {
    if (const auto* p = find_page(page_id)) return *p;
    throw NotFound("unknown page \"" + std::string(page_id) + "\"");
}

PageRecord parse_page_record(std::string_view line) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    if (!j.is_object()) throw ParseError("page record must be an object", 0);
    PageRecord rec;
    try {
        rec.page_id = j.at("page_id").get<std::string>();
        rec.title = j.at("title").get<std::string>();
        rec.paragraphs = j.at("paragraphs").get<std::vector<std::string>>();
        if (j.contains("links")) {
            for (const auto& link : j.at("links")) {
                if (!link.is_array() || link.size() != 2) throw ParseError("link must be [anchor, target]", 0);
                rec.links.emplace_back(link[0].get<std::string>(), link[1].get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what(), 0);
    }
    return rec;
}

std::string serialize_page_record(const PageRecord& page) {
    nlohmann::ordered_json j;
    j["page_id"] = page.page_id;
    j["title"] = page.title;
    j["paragraphs"] = page.paragraphs;
    auto links = nlohmann::ordered_json::array();
    for (const auto& [anchor, target] : page.links) links.push_back({anchor, target});
    j["links"] = links;
    return j.dump();
}

Corpus parse_corpus(std::istream& in) {
    std::vector<PageRecord> records;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            records.push_back(parse_page_record(line));
        } catch (const ParseError& e) {
            throw LoadError(e.what(), line_no);
        }
        line_numbers.push_back(line_no);
    }
    try {
        return Corpus::from_pages(std::move(records));
    } catch (const LoadError& e) {
        // from_pages numbers records, not file lines.
        std::size_t rec = e.line();
        std::string msg = e.what();
        if (auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw LoadError(msg, rec > 0 && rec <= line_numbers.size() ? line_numbers[rec - 1] : 0);
    }
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open corpus file " + path.string());
    return parse_corpus(in);
}

}  // namespace qagame
