#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "qagame/service.hpp"

namespace httplib {
class Server;
}

namespace qagame {

// JSON-over-HTTP binding of GameService. Errors map to 404 (unknown id),
// 409 (illegal state) and 422 (malformed payload), body {"error": msg}.
class HttpApi {
public:
    explicit HttpApi(GameService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpApi();

    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port; serve it with listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    void install_routes();

    GameService& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace qagame
