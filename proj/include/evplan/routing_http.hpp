#pragma once

#include <atomic>
#include <string>

#include <json.hpp>

#include "evplan/mobility.hpp"

namespace evplan {

struct RoutingConfig {
    std::string base_url = "https://api.openrouteservice.org";
    std::string matrix_path = "/v2/matrix/driving-car";
    std::string api_key_env = "ORS_API_KEY";  ///< read at request time; may be unset
    double timeout_s = 30.0;
    std::size_t max_batch = 3500;  ///< max sources*destinations per request
    int max_in_flight = 2;
    int max_attempts = 3;
    double backoff_s = 1.0;  ///< first retry delay; doubles each attempt
};

/// Distance provider speaking an OpenRouteService-style matrix API:
/// POST {locations, sources, destinations, metrics:["distance"], units:"km"}
/// and reads `distances` (null = unroutable). Large matrices are split into
/// blocks of at most `max_batch` elements and fetched with up to
/// `max_in_flight` concurrent requests.
class HttpMatrixRouter : public DistanceProvider {
public:
    explicit HttpMatrixRouter(RoutingConfig config);

    std::vector<std::optional<double>> matrix(std::span<const LonLat> sources,
                                              std::span<const LonLat> destinations) override;

    std::size_t requests_sent() const { return requests_.load(); }

    /// Request body for one block (exposed for tests).
    static nlohmann::json request_body(std::span<const LonLat> sources, std::span<const LonLat> destinations);

    /// Parses a response body into a row-major block.
    static std::vector<std::optional<double>> parse_response(const std::string& body, std::size_t n_sources,
                                                             std::size_t n_destinations);

private:
    std::vector<std::optional<double>> fetch_block(std::span<const LonLat> sources,
                                                   std::span<const LonLat> destinations);

    RoutingConfig config_;
    std::atomic<std::size_t> requests_{0};
};

}  // namespace evplan
