#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "evplan/pv_model.hpp"

namespace evplan {

/// Weather CSV with columns time, G(h), Gb(n), Gd(h), T2m, WS10m. `time` is
/// ISO-8601 UTC ("2020-01-01T00:10:00Z") or the PVGIS form "20200101:0010".
WeatherSeries parse_weather_csv(std::string_view text, double lat, double lon, double utc_offset_h,
                                const std::string& source_name = "<memory>");
WeatherSeries read_weather_csv(const std::filesystem::path& path, double lat, double lon, double utc_offset_h);

/// Seconds since the epoch for either accepted timestamp form; nullopt if malformed.
std::optional<double> parse_timestamp(std::string_view s);

/// Converts a PVGIS hourly `seriescalc` JSON response (horizontal plane,
/// components=1) into a weather series. DNI is recovered from the horizontal
/// beam and the reported sun height.
WeatherSeries pvgis_json_to_weather(const nlohmann::json& doc, double utc_offset_h);

std::string weather_to_csv(const WeatherSeries& w);

struct PvgisConfig {
    std::string base_url = "https://re.jrc.ec.europa.eu";
    std::string path = "/api/v5_3/seriescalc";
    double timeout_s = 60.0;
    int max_attempts = 3;
};

/// Downloads one year of hourly data. Network or API failures raise ServiceError.
WeatherSeries fetch_pvgis_year(double lat, double lon, int year, double utc_offset_h, const PvgisConfig& cfg = {});

}  // namespace evplan
