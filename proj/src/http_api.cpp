#include "qagame/http_api.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, json{{"error", message}}, status);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) throw ServiceError(422, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ServiceError(422, e.what());
    }
}

json hit_json(const SearchHit& h) {
    return {{"paragraph_id", h.paragraph_id}, {"page_id", h.page_id}, {"page_title", h.page_title},
            {"score", h.score},           {"engine", to_string(h.engine)}, {"rank", h.rank}};
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::size_t parse_count(const std::string& raw, const char* name) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(raw, &used);
        if (used != raw.size() || v < 1) throw std::invalid_argument(name);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ServiceError(422, std::string(name) + " must be a positive integer");
    }
}

// Runs a handler, translating domain errors to status codes.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.status(), e.what());
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const StateError& e) {
            send_error(res, 409, e.what());
        } catch (const ConflictError& e) {
            send_error(res, 409, e.what());
        } catch (const json::exception& e) {
            send_error(res, 422, e.what());
        } catch (const std::invalid_argument& e) {
            send_error(res, 422, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

}  // namespace

HttpApi::HttpApi(GameService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    install_routes();
    if (static_dir) server_->set_mount_point("/", static_dir->string());
}

HttpApi::~HttpApi() = default;

void HttpApi::install_routes() {
    auto& svc = service_;
    auto& srv = *server_;

    srv.Post("/api/session", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 if (!body.contains("player_id") || !body["player_id"].is_string()) {
                     throw ServiceError(422, "player_id (string) is required");
                 }
                 auto created = svc.create_session(body["player_id"].get<std::string>());
                 send_json(res, {{"session_id", created.session_id},
                                 {"question_id", created.question_id},
                                 {"clue", created.clue},
                                 {"timer_total", created.timer_total}});
             }));

    srv.Post(R"(/api/session/([^/]+)/clue)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, {{"clue", svc.reveal_clue(req.matches[1])}});
             }));

    srv.Get(R"(/api/session/([^/]+)/search)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                Engine engine = Engine::sparse;
                if (req.has_param("engine")) engine = parse_engine(req.get_param_value("engine"));
                if (!req.has_param("q")) throw ServiceError(422, "q is required");
                std::size_t k = req.has_param("k") ? parse_count(req.get_param_value("k"), "k") : 10;
                QueryOrigin origin = QueryOrigin::typed;
                if (req.has_param("origin")) origin = parse_query_origin(req.get_param_value("origin"));
                auto hits = svc.search(req.matches[1], engine, req.get_param_value("q"), k, origin);
                json arr = json::array();
                for (const auto& h : hits) arr.push_back(hit_json(h));
                send_json(res, {{"hits", std::move(arr)}});
            }));

    srv.Get(R"(/api/page/(.+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                std::optional<std::string> highlight;
                if (req.has_param("highlight")) highlight = req.get_param_value("highlight");
                auto view = svc.page(req.matches[1], highlight);
                send_json(res, {{"page_id", view.page_id},
                                {"title", view.title},
                                {"paragraphs", view.paragraphs},
                                {"highlight_index", view.highlight_index ? json(*view.highlight_index) : json(nullptr)}});
            }));

    srv.Post(R"(/api/session/([^/]+)/evidence)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 if (!body.contains("paragraph_id") || !body["paragraph_id"].is_string()) {
                     throw ServiceError(422, "paragraph_id (string) is required");
                 }
                 EvidenceKind kind = EvidenceKind::manual;
                 if (body.contains("kind")) kind = parse_evidence_kind(body["kind"].get<std::string>());
                 std::optional<TokenSpan> span;
                 if (body.contains("span") && !body["span"].is_null()) {
                     const auto& s = body["span"];
                     if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned()) {
                         throw ServiceError(422, "span must be [start, end]");
                     }
                     span = TokenSpan{s[0].get<std::size_t>(), s[1].get<std::size_t>()};
                 }
                 svc.record_evidence(req.matches[1], body["paragraph_id"].get<std::string>(), span, kind);
                 res.status = 204;
             }));

    srv.Get(R"(/api/session/([^/]+)/suggestions)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                auto s = svc.suggestions(req.matches[1]);
                send_json(res, {{"golden", optional_json(s.golden)},
                                {"irrr", optional_json(s.irrr)},
                                {"answer", optional_json(s.answer)}});
            }));

    srv.Post(R"(/api/session/([^/]+)/answer)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 if (!body.contains("text") || !body["text"].is_string()) throw ServiceError(422, "text is required");
                 auto result = svc.answer(req.matches[1], body["text"].get<std::string>());
                 send_json(res, {{"verdict", to_json(result.verdict)}, {"score", to_json(result.score)}});
             }));

    srv.Post(R"(/api/session/([^/]+)/skip)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, {{"score", to_json(svc.skip(req.matches[1]))}});
             }));

    srv.Get("/api/leaderboard", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                std::size_t n = req.has_param("n") ? parse_count(req.get_param_value("n"), "n") : 10;
                json arr = json::array();
                for (const auto& e : svc.leaderboard(n)) {
                    arr.push_back({{"player_id", e.player_id},
                                   {"total_score", e.total_score},
                                   {"questions_answered", e.questions_answered},
                                   {"correct", e.correct}});
                }
                send_json(res, arr);
            }));

    srv.Get("/api/export", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                std::optional<std::string> player;
                if (req.has_param("player")) player = req.get_param_value("player");
                std::string body;
                for (const auto& p : svc.export_paths(player)) body += serialize(p) + "\n";
                res.set_content(body, "application/x-ndjson");
            }));

    srv.Get("/api/export/suggestions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                std::optional<std::string> player;
                if (req.has_param("player")) player = req.get_param_value("player");
                std::string body;
                for (const auto& s : svc.export_suggestions(player)) body += serialize(s) + "\n";
                res.set_content(body, "application/x-ndjson");
            }));
}

bool HttpApi::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpApi::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpApi::listen_after_bind() { return server_->listen_after_bind(); }

void HttpApi::wait_until_ready() const { server_->wait_until_ready(); }

void HttpApi::stop() { server_->stop(); }

}  // namespace qagame
