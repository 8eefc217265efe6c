#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qagame/text.hpp"

namespace qagame {

struct Paragraph {
    std::string paragraph_id;  // "<page_id>#<ordinal>"
    std::string text;
    std::string page_id;
    std::size_t ordinal = 0;
};

struct PageLink {
    std::string anchor;
    std::string target;
    bool dangling = false;
};

struct Page {
    std::string page_id;
    std::string title;
    std::vector<std::string> paragraphs;  // paragraph ids, in page order
    std::vector<PageLink> links;
};

/// Input record for one page, as it appears on one corpus line.
struct PageRecord {
    std::string page_id;
    std::string title;
    std::vector<std::string> paragraphs;
    std::vector<std::pair<std::string, std::string>> links;
};

std::string make_paragraph_id(std::string_view page_id, std::size_t ordinal);

/// Immutable paragraph-segmented document collection.
class Corpus {
public:
    Corpus() = default;

    /// Throws LoadError on duplicate page ids, empty pages or blank paragraphs.
    static Corpus from_pages(std::vector<PageRecord> pages);

    std::span<const Page> pages() const { return pages_; }
    std::span<const Paragraph> paragraphs() const { return paragraphs_; }

    const Page* find_page(std::string_view page_id) const;
    const Paragraph* find_paragraph(std::string_view paragraph_id) const;

    /// Throws NotFound.
    const Paragraph& get_paragraph(std::string_view paragraph_id) const;
    const Page& get_page(std::string_view page_id) const;

    std::size_t paragraph_count() const { return paragraphs_.size(); }
    std::size_t token_count(std::size_t paragraph_index) const { return token_counts_[paragraph_index]; }
    double avgdl() const { return avgdl_; }
    std::size_t dangling_link_count() const { return dangling_links_; }

private:
    std::vector<Page> pages_;
    std::vector<Paragraph> paragraphs_;
    std::vector<std::size_t> token_counts_;
    std::unordered_map<std::string, std::size_t> page_index_;
    std::unordered_map<std::string, std::size_t> paragraph_index_;
    double avgdl_ = 0.0;
    std::size_t dangling_links_ = 0;
};

/// Parses one page per line; blank lines are skipped. LoadError carries the line.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

PageRecord parse_page_record(std::string_view line);
std::string serialize_page_record(const PageRecord& page);

}  // namespace qagame
