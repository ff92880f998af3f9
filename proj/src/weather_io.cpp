#include "evplan/weather_io.hpp"

#include <httplib.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "evplan/csv.hpp"
#include "evplan/errors.hpp"
#include "evplan/timeutil.hpp"

namespace evplan {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    const auto* b = s.data() + pos;
    const auto r = std::from_chars(b, b + len, out);
    return r.ec == std::errc() && r.ptr == b + len;
}

std::optional<double> compose(int y, int mo, int d, int h, int mi, int sec) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 24 || mi < 0 || mi > 59 || sec < 0 || sec > 60)
        return std::nullopt;
    return static_cast<double>(timeutil::days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) *
               86400.0 +
           h * 3600.0 + mi * 60.0 + sec;
}

}  // namespace

std::optional<double> parse_timestamp(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    // PVGIS: YYYYMMDD:HHMM
    if (s.size() == 13 && s[8] == ':') {
        if (read_int(s, 0, 4, y) && read_int(s, 4, 2, mo) && read_int(s, 6, 2, d) && read_int(s, 9, 2, h) &&
            read_int(s, 11, 2, mi))
            return compose(y, mo, d, h, mi, 0);
        return std::nullopt;
    }
    // ISO: YYYY-MM-DDTHH:MM[:SS][Z|+00:00]
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        return std::nullopt;
    if (!(read_int(s, 0, 4, y) && read_int(s, 5, 2, mo) && read_int(s, 8, 2, d) && read_int(s, 11, 2, h) &&
          read_int(s, 14, 2, mi)))
        return std::nullopt;
    std::string_view rest = s.substr(16);
    if (rest.size() >= 3 && rest[0] == ':') {
        if (!read_int(rest, 1, 2, sec)) return std::nullopt;
        rest = rest.substr(3);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;
    return compose(y, mo, d, h, mi, sec);
}

WeatherSeries parse_weather_csv(std::string_view text, double lat, double lon, double utc_offset_h,
                                const std::string& source_name) {
    const auto table = csv::parse(text, source_name);
    const char* names[] = {"time", "G(h)", "Gb(n)", "Gd(h)", "T2m", "WS10m"};
    int col[6];
    for (int k = 0; k < 6; ++k) {
        col[k] = table.column(names[k]);
        if (col[k] < 0) throw InputDataError(source_name + ": missing weather column '" + names[k] + "'");
    }
    WeatherSeries w;
    w.lat = lat;
    w.lon = lon;
    w.utc_offset_h = utc_offset_h;
    w.records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = source_name + ":" + std::to_string(table.line_numbers[r]);
        const auto t = parse_timestamp(row[static_cast<std::size_t>(col[0])]);
        if (!t) throw InputDataError(where + ": bad timestamp '" + row[static_cast<std::size_t>(col[0])] + "'");
        WeatherRecord rec;
        rec.t = *t;
        rec.ghi = csv::to_double(row[static_cast<std::size_t>(col[1])], where);
        rec.dni = csv::to_double(row[static_cast<std::size_t>(col[2])], where);
        rec.dhi = csv::to_double(row[static_cast<std::size_t>(col[3])], where);
        rec.t_amb = csv::to_double(row[static_cast<std::size_t>(col[4])], where);
        rec.wind = csv::to_double(row[static_cast<std::size_t>(col[5])], where);
        w.records.push_back(rec);
    }
    w.validate();
    return w;
}

WeatherSeries read_weather_csv(const std::filesystem::path& path, double lat, double lon, double utc_offset_h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputDataError("cannot open weather file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_weather_csv(ss.str(), lat, lon, utc_offset_h, path.string());
}

WeatherSeries pvgis_json_to_weather(const nlohmann::json& doc, double utc_offset_h) {
    try {
        WeatherSeries w;
        w.utc_offset_h = utc_offset_h;
        const auto& loc = doc.at("inputs").at("location");
        w.lat = loc.at("latitude").get<double>();
        w.lon = loc.at("longitude").get<double>();
        for (const auto& h : doc.at("outputs").at("hourly")) {
            const auto t = parse_timestamp(h.at("time").get<std::string>());
            if (!t) throw InputDataError("PVGIS response has a bad timestamp");
            WeatherRecord r;
            r.t = *t;
            const double beam_h = h.at("Gb(i)").get<double>();
            r.dhi = h.at("Gd(i)").get<double>();
            r.ghi = beam_h + r.dhi;
            const double sun_h = h.value("H_sun", 0.0);
            r.dni = sun_h > 1.0 ? beam_h / std::sin(sun_h * 3.14159265358979323846 / 180.0) : 0.0;
            r.t_amb = h.at("T2m").get<double>();
            r.wind = h.at("WS10m").get<double>();
            w.records.push_back(r);
        }
        w.validate();
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw InputDataError(std::string("unexpected PVGIS response layout: ") + e.what());
    }
}

std::string weather_to_csv(const WeatherSeries& w) {
    std::ostringstream os;
    os << "time,G(h),Gb(n),Gd(h),T2m,WS10m\n";
    for (const auto& r : w.records) {
        const auto sec = static_cast<std::int64_t>(std::llround(r.t));
        const std::int64_t day = sec >= 0 ? sec / 86400 : (sec - 86399) / 86400;
        os << timeutil::format_datetime(day, sec - day * 86400) << "Z," << csv::fixed(r.ghi, 2) << ','
           << csv::fixed(r.dni, 2) << ',' << csv::fixed(r.dhi, 2) << ',' << csv::fixed(r.t_amb, 2) << ','
           << csv::fixed(r.wind, 2) << '\n';
    }
    return os.str();
}

WeatherSeries fetch_pvgis_year(double lat, double lon, int year, double utc_offset_h, const PvgisConfig& cfg) {
    httplib::Client client(cfg.base_url);
    const auto secs = static_cast<time_t>(cfg.timeout_s);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    std::ostringstream q;
    q << cfg.path << "?lat=" << csv::fixed(lat, 4) << "&lon=" << csv::fixed(lon, 4) << "&startyear=" << year
      << "&endyear=" << year << "&angle=0&aspect=0&components=1&outputformat=json";
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < std::max(1, cfg.max_attempts); ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
        auto res = client.Get(q.str());
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (res->status >= 400 && res->status < 500 && res->status != 429) break;
            continue;
        }
        nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded()) {
            last_error = "response is not JSON";
            continue;
        }
        return pvgis_json_to_weather(doc, utc_offset_h);
    }
    throw ServiceError("PVGIS request failed: " + last_error);
}

}  // namespace evplan
