#include "evplan/routing_http.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "evplan/errors.hpp"

namespace evplan {

namespace {

struct Block {
    std::size_t row0, rows, col0, cols;
};

}  // namespace

HttpMatrixRouter::HttpMatrixRouter(RoutingConfig config) : config_(std::move(config)) {
    if (config_.max_batch == 0) throw ConfigError("routing.max_batch must be positive");
    if (config_.max_in_flight < 1) throw ConfigError("routing.max_in_flight must be >= 1");
    if (config_.max_attempts < 1) throw ConfigError("routing.max_attempts must be >= 1");
}

nlohmann::json HttpMatrixRouter::request_body(std::span<const LonLat> sources, std::span<const LonLat> destinations) {
    nlohmann::json locations = nlohmann::json::array();
    nlohmann::json src = nlohmann::json::array(), dst = nlohmann::json::array();
    for (const auto& p : sources) {
        src.push_back(locations.size());
        locations.push_back({p.lon, p.lat});
    }
    for (const auto& p : destinations) {
        dst.push_back(locations.size());
        locations.push_back({p.lon, p.lat});
    }
    return {{"locations", locations},
            {"sources", src},
            {"destinations", dst},
            {"metrics", {"distance"}},
            {"units", "km"}};
}

std::vector<std::optional<double>> HttpMatrixRouter::parse_response(const std::string& body, std::size_t n_sources,
                                                                    std::size_t n_destinations) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ServiceError(std::string("routing response is not JSON: ") + e.what());
    }
    if (!doc.contains("distances") || !doc["distances"].is_array() || doc["distances"].size() != n_sources)
        throw ServiceError("routing response lacks a distances matrix of the requested shape");
    std::vector<std::optional<double>> out(n_sources * n_destinations);
    for (std::size_t i = 0; i < n_sources; ++i) {
        const auto& row = doc["distances"][i];
        if (!row.is_array() || row.size() != n_destinations) throw ServiceError("routing response row has wrong length");
        for (std::size_t j = 0; j < n_destinations; ++j)
            if (row[j].is_number()) out[i * n_destinations + j] = row[j].get<double>();
    }
    return out;
}

std::vector<std::optional<double>> HttpMatrixRouter::fetch_block(std::span<const LonLat> sources,
                                                                 std::span<const LonLat> destinations) {
    httplib::Client client(config_.base_url);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Headers headers{{"Accept", "application/json"}};
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) headers.emplace("Authorization", key);
    const std::string body = request_body(sources, destinations).dump();

    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            const double delay = config_.backoff_s * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        ++requests_;
        auto res = client.Post(config_.matrix_path, headers, body, "application/json");
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return parse_response(res->body, sources.size(), destinations.size());
        last_error = "HTTP " + std::to_string(res->status);
        // Client errors other than rate limiting will not improve on retry.
        if (res->status >= 400 && res->status < 500 && res->status != 429) break;
    }
    throw ServiceError("routing request failed: " + last_error);
}

std::vector<std::optional<double>> HttpMatrixRouter::matrix(std::span<const LonLat> sources,
                                                            std::span<const LonLat> destinations) {
    const std::size_t ns = sources.size(), nd = destinations.size();
    std::vector<std::optional<double>> out(ns * nd);
    if (ns == 0 || nd == 0) return out;

    const std::size_t cols = std::min(nd, config_.max_batch);
    const std::size_t rows = std::max<std::size_t>(1, config_.max_batch / cols);
    std::vector<Block> blocks;
    for (std::size_t r = 0; r < ns; r += rows)
        for (std::size_t c = 0; c < nd; c += cols) blocks.push_back({r, std::min(rows, ns - r), c, std::min(cols, nd - c)});

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            const Block& blk = blocks[b];
            try {
                const auto part = fetch_block(sources.subspan(blk.row0, blk.rows), destinations.subspan(blk.col0, blk.cols));
                for (std::size_t i = 0; i < blk.rows; ++i)
                    for (std::size_t j = 0; j < blk.cols; ++j)
                        out[(blk.row0 + i) * nd + blk.col0 + j] = part[i * blk.cols + j];
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), blocks.size());
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace evplan
