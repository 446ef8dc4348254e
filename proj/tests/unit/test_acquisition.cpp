#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bessmarket/acquisition.hpp"
#include "bessmarket/util.hpp"
#include "support.hpp"

using namespace bessmarket;
using bessmarket::test::TempDir;
using bessmarket::test::make_series_madrid;

namespace {

template <class F>
Errc thrown_code(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error to be thrown");
    return Errc::analysis_error;
}

// In-process provider double: canned JSON payloads per indicator id.
class FixtureServer {
  public:
    FixtureServer() {
        server_.Get(R"(/indicators/(\w+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        ++hits_;
                        last_key_ = req.get_header_value("x-api-key");
                        const auto it = payloads_.find(req.matches[1]);
                        if (it == payloads_.end()) {
                            res.status = 404;
                            res.set_content("{\"error\":\"unknown indicator\"}",
                                            "application/json");
                            return;
                        }
                        res.set_content(it->second, "application/json");
                    });
        port_ = server_.bind_to_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FixtureServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    void add(const std::string& id, std::string payload) {
        payloads_[id] = std::move(payload);
    }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    long hits() const { return hits_.load(); }
    std::string last_key() const { return last_key_; }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::map<std::string, std::string> payloads_;
    std::atomic<long> hits_{0};
    std::string last_key_;
};

std::string payload_json(const std::string& id, const std::string& name,
                         const std::vector<std::pair<std::string, nlohmann::json>>& values) {
    nlohmann::json doc;
    doc["indicator"]["id"] = id;
    doc["indicator"]["name"] = name;
    auto& arr = doc["indicator"]["values"];
    arr = nlohmann::json::array();
    for (const auto& [datetime, value] : values) {
        nlohmann::json v;
        v["datetime"] = datetime;
        v["value"] = value;
        arr.push_back(v);
    }
    return doc.dump();
}

std::string payload_from_series(const std::string& id, const HourlyPriceSeries& series) {
    std::vector<std::pair<std::string, nlohmann::json>> values;
    values.reserve(series.size());
    for (const auto& p : series.points)
        values.emplace_back(format_hour_stamp(p.t), p.value);
    return payload_json(id, "fixture " + id, values);
}

const CivilDate kDay{2019, 6, 10};
const DateRange kSpan{kDay, kDay};

HourlyPriceSeries day_series(double base) {
    return make_series_madrid(MarketKind::day_ahead, "ES", kDay, kDay,
                              [base](std::size_t i, const HourStamp&) {
                                  return base + static_cast<double>(i) * 0.5;
                              });
}

DataSourceConfig open_config(const FixtureServer& server, const TempDir& dir) {
    DataSourceConfig config;
    config.base_url = server.base_url();
    config.requires_token = false;
    config.cache_dir = dir.path() / "cache";
    config.indicators[MarketKind::day_ahead] = "600";
    config.reserve.band_price = "634";
    config.reserve.band_up = "2130";
    config.reserve.band_down = "2131";
    config.reserve.energy_up = "680";
    config.reserve.energy_down = "681";
    return config;
}

}  // namespace

TEST_CASE("payload parsing sorts values and flags drift") {
    const std::string good = payload_json("600", "spot price",
                                          {{"2019-06-10T02:00:00+02:00", 30.5},
                                           {"2019-06-10T00:00:00+02:00", 10.0},
                                           {"2019-06-10T01:00:00+02:00", nullptr},
                                           {"2019-06-10T03:00:00.000+02:00", -7.25}});
    const Payload p = parse_payload(good, "t");
    CHECK(p.id == "600");
    CHECK(p.name == "spot price");
    REQUIRE(p.values.size() == 3);  // the null entry is skipped
    CHECK(p.values[0].value == 10.0);
    CHECK(p.values[1].value == 30.5);
    CHECK(p.values[2].value == -7.25);  // fractional seconds accepted
    CHECK(p.values[0].t.utc_sec < p.values[1].t.utc_sec);

    // Integer indicator ids are normalized to strings.
    CHECK(parse_payload("{\"indicator\":{\"id\":600,\"values\":[]}}", "t").id == "600");

    CHECK(thrown_code([] { parse_payload("not json", "t"); }) == Errc::schema_drift);
    CHECK(thrown_code([] { parse_payload("{}", "t"); }) == Errc::schema_drift);
    CHECK(thrown_code([] { parse_payload("{\"indicator\":{}}", "t"); }) == Errc::schema_drift);
    CHECK(thrown_code([] {
              parse_payload("{\"indicator\":{\"values\":[{\"value\":1}]}}", "t");
          }) == Errc::schema_drift);
    CHECK(thrown_code([] {
              parse_payload("{\"indicator\":{\"values\":[{\"datetime\":\"junk\",\"value\":1}]}}",
                            "t");
          }) == Errc::schema_drift);
    CHECK(thrown_code([] {
              parse_payload("{\"indicator\":{\"values\":"
                            "[{\"datetime\":\"2019-06-10T00:00:00+02:00\",\"value\":\"x\"}]}}",
                            "t");
          }) == Errc::schema_drift);
    CHECK(thrown_code([] {
              parse_payload("{\"indicator\":{\"values\":"
                            "[{\"datetime\":\"2019-06-10T00:00:00+02:00\"}]}}",
                            "t");
          }) == Errc::schema_drift);

    const std::string dup = payload_json("600", "x",
                                         {{"2019-06-10T00:00:00+02:00", 1.0},
                                          {"2019-06-10T00:00:00+02:00", 2.0}});
    CHECK(thrown_code([&] { parse_payload(dup, "t"); }) == Errc::duplicate_hour);
}

TEST_CASE("payload conversion emits exact CSV bytes") {
    const std::string payload = payload_json("600", "x",
                                             {{"2019-06-10T02:00:00+02:00", 30.5},
                                              {"2019-06-10T00:00:00+02:00", 10.0},
                                              {"2019-06-10T01:00:00+02:00", -7.25}});
    const ConvertResult r = convert_payload_to_csv(payload, "t");
    CHECK(r.rows == 3);
    CHECK(r.warnings.empty());
    CHECK(r.csv ==
          "hour_start,value\n"
          "2019-06-10T00:00:00+02:00,10\n"
          "2019-06-10T01:00:00+02:00,-7.25\n"
          "2019-06-10T02:00:00+02:00,30.5\n");

    const std::string holed = payload_json("600", "x",
                                           {{"2019-06-10T00:00:00+02:00", 10.0},
                                            {"2019-06-10T03:00:00+02:00", 30.5}});
    const ConvertResult h = convert_payload_to_csv(holed, "t");
    CHECK(h.rows == 2);
    REQUIRE(h.warnings.size() == 1);
    CHECK(h.warnings[0].kind == "Gap");
    CHECK(h.warnings[0].message == "2 missing hour(s) before 2019-06-10T03:00:00+02:00");
}

TEST_CASE("fetch writes the cache once and replays from it") {
    FixtureServer server;
    TempDir dir("fetch");
    const HourlyPriceSeries series = day_series(40.0);
    server.add("600", payload_from_series("600", series));
    const DataSourceConfig config = open_config(server, dir);

    FetchStats stats;
    const CacheEntry first = fetch(config, MarketKind::day_ahead, "ES", kSpan, &stats);
    CHECK_FALSE(first.from_cache);
    CHECK(first.rows == 24);
    CHECK(stats.network_requests == 1);
    CHECK(server.hits() == 1);
    CHECK(first.label == "day_ahead");
    CHECK(std::filesystem::exists(first.raw_path));
    CHECK(std::filesystem::exists(first.csv_path));
    CHECK(std::filesystem::exists(first.meta_path));

    const std::string csv = read_file(first.csv_path.string());
    CHECK(csv == series_to_csv(series));

    const auto meta = nlohmann::json::parse(read_file(first.meta_path.string()));
    CHECK(meta["kind"] == "single");
    CHECK(meta["indicator"] == "600");
    CHECK(meta["zone"] == "ES");
    CHECK(meta["rows"] == 24);
    CHECK(meta["csv_fnv1a"] == fnv1a_hex(csv));
    CHECK(meta["raw_fnv1a"] == fnv1a_hex(read_file(first.raw_path.string())));

    FetchStats again;
    const CacheEntry second = fetch(config, MarketKind::day_ahead, "ES", kSpan, &again);
    CHECK(second.from_cache);
    CHECK(second.rows == 24);
    CHECK(again.network_requests == 0);
    CHECK(server.hits() == 1);
    CHECK(read_file(second.csv_path.string()) == csv);
}

TEST_CASE("fetch authentication and configuration errors") {
    FixtureServer server;
    TempDir dir("auth");
    server.add("600", payload_from_series("600", day_series(40.0)));

    DataSourceConfig config = open_config(server, dir);
    CHECK(thrown_code([&] {
              fetch(config, MarketKind::intraday_adjustment, "ES", kSpan, nullptr);
          }) == Errc::config_error);

    config.requires_token = true;
    config.token_env = "BESSMARKET_TEST_TOKEN";
    unsetenv("BESSMARKET_TEST_TOKEN");
    CHECK(thrown_code([&] {
              fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
          }) == Errc::auth_missing);
    CHECK(server.hits() == 0);

    setenv("BESSMARKET_TEST_TOKEN", "sekrit", 1);
    const CacheEntry entry = fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
    CHECK_FALSE(entry.from_cache);
    CHECK(server.last_key() == "sekrit");

    // A warm cache needs no token at all.
    unsetenv("BESSMARKET_TEST_TOKEN");
    const CacheEntry cached = fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
    CHECK(cached.from_cache);

    DataSourceConfig bad = config;
    bad.requires_token = false;
    bad.base_url = "127.0.0.1:9";
    CHECK(thrown_code([&] { fetch(bad, MarketKind::day_ahead, "PT", kSpan, nullptr); }) ==
          Errc::config_error);
}

TEST_CASE("http failures surface as http_error") {
    FixtureServer server;
    TempDir dir("http");
    DataSourceConfig config = open_config(server, dir);

    // Unknown indicator: the server answers 404.
    config.indicators[MarketKind::day_ahead] = "nope";
    CHECK(thrown_code([&] {
              fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
          }) == Errc::http_error);

    DataSourceConfig refused = open_config(server, dir);
    refused.base_url = "http://127.0.0.1:1";
    CHECK(thrown_code([&] {
              fetch(refused, MarketKind::day_ahead, "ES", kSpan, nullptr);
          }) == Errc::http_error);
}

TEST_CASE("reserve fetch joins five indicators into one series") {
    FixtureServer server;
    TempDir dir("reserve");
    const DataSourceConfig config = open_config(server, dir);

    const auto column = [&](MarketKind kind, double base) {
        return make_series_madrid(kind, "ES", kDay, kDay,
                                  [base](std::size_t i, const HourStamp&) {
                                      return base + static_cast<double>(i);
                                  });
    };
    server.add("634", payload_from_series("634", column(MarketKind::secondary_band_price, 19.5)));
    server.add("2130", payload_from_series("2130", column(MarketKind::day_ahead, 500.0)));
    // Downward columns arrive positive from the provider.
    server.add("2131", payload_from_series("2131", column(MarketKind::day_ahead, 400.0)));
    server.add("680", payload_from_series("680", column(MarketKind::day_ahead, 100.0)));
    HourlyPriceSeries down_energy = column(MarketKind::day_ahead, 80.0);
    down_energy.points.pop_back();  // one missing hour drops that hour everywhere
    server.add("681", payload_from_series("681", down_energy));

    FetchStats stats;
    const CacheEntry joined = fetch_reserve(config, "ES", kSpan, &stats);
    CHECK_FALSE(joined.from_cache);
    CHECK(stats.network_requests == 5);
    CHECK(joined.rows == 23);
    CHECK(joined.label == "secondary_reserve");

    bool gap = false, coerced_band = false, coerced_energy = false;
    for (const auto& w : joined.warnings) {
        if (w.kind == "Gap" && w.message.find("energy_down") != std::string::npos) gap = true;
        if (w.kind == "SignCoercion" && w.message.find("band_down") != std::string::npos)
            coerced_band = true;
        if (w.kind == "SignCoercion" && w.message.find("energy_down") != std::string::npos)
            coerced_energy = true;
    }
    CHECK(gap);
    CHECK(coerced_band);
    CHECK(coerced_energy);

    const std::string csv = read_file(joined.csv_path.string());
    const ReserveIngestResult back = ingest_reserve_csv_text(csv, "ES", "joined");
    REQUIRE(back.series.size() == 23);
    CHECK(back.series.band_price[0] == 19.5);
    CHECK(back.series.band_up[0] == 500.0);
    CHECK(back.series.band_down[0] == -400.0);
    CHECK(back.series.energy_up[5] == 105.0);
    CHECK(back.series.energy_down[5] == -85.0);

    const auto meta = nlohmann::json::parse(read_file(joined.meta_path.string()));
    CHECK(meta["kind"] == "reserve_join");
    CHECK(meta["rows"] == 23);
    CHECK(meta["components"].size() == 5);
    CHECK(meta["components"]["reserve_band_price"]["indicator"] == "634");

    FetchStats again;
    const CacheEntry cached = fetch_reserve(config, "ES", kSpan, &again);
    CHECK(cached.from_cache);
    CHECK(cached.rows == 23);
    CHECK(again.network_requests == 0);

    // A provider payload with a negative band price is rejected outright.
    TempDir dir2("reserve_neg");
    DataSourceConfig config2 = open_config(server, dir2);
    server.add("634", payload_json("634", "x", {{"2019-06-10T00:00:00+02:00", -3.0}}));
    server.add("2130", payload_json("2130", "x", {{"2019-06-10T00:00:00+02:00", 500.0}}));
    server.add("2131", payload_json("2131", "x", {{"2019-06-10T00:00:00+02:00", 400.0}}));
    server.add("680", payload_json("680", "x", {{"2019-06-10T00:00:00+02:00", 100.0}}));
    server.add("681", payload_json("681", "x", {{"2019-06-10T00:00:00+02:00", 80.0}}));
    CHECK(thrown_code([&] { fetch_reserve(config2, "ES", kSpan, nullptr); }) ==
          Errc::negative_band_price);

    DataSourceConfig incomplete = config;
    incomplete.reserve.energy_down.clear();
    CHECK(thrown_code([&] { fetch_reserve(incomplete, "ES", kSpan, nullptr); }) ==
          Errc::config_error);
}

TEST_CASE("verify_cache re-derives every cached CSV") {
    FixtureServer server;
    TempDir dir("verify");
    const DataSourceConfig config = open_config(server, dir);

    const auto column = [&](double base) {
        return make_series_madrid(MarketKind::day_ahead, "ES", kDay, kDay,
                                  [base](std::size_t i, const HourStamp&) {
                                      return base + static_cast<double>(i);
                                  });
    };
    server.add("600", payload_from_series("600", column(40.0)));
    server.add("634", payload_from_series("634", column(19.5)));
    server.add("2130", payload_from_series("2130", column(500.0)));
    server.add("2131", payload_from_series("2131", column(400.0)));
    server.add("680", payload_from_series("680", column(100.0)));
    server.add("681", payload_from_series("681", column(80.0)));

    const VerifyReport empty = verify_cache(config);
    CHECK(empty.entries.empty());
    CHECK(empty.all_ok());

    const CacheEntry single = fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
    const CacheEntry joined = fetch_reserve(config, "ES", kSpan, nullptr);

    // One market CSV, the joined reserve CSV, and five component CSVs.
    VerifyReport report = verify_cache(config);
    CHECK(report.entries.size() == 7);
    CHECK(report.all_ok());

    // Tampering with a derived CSV is detected.
    write_file_atomic(single.csv_path.string(),
                      read_file(single.csv_path.string()) + "tampered\n");
    report = verify_cache(config);
    CHECK_FALSE(report.all_ok());
    int mismatches = 0;
    for (const auto& e : report.entries)
        if (e.status == VerifyStatus::mismatch) {
            ++mismatches;
            CHECK(e.csv_path == single.csv_path);
        }
    CHECK(mismatches == 1);

    // Restore, then remove a raw payload: that entry becomes unverifiable.
    const CacheEntry redo = fetch(config, MarketKind::day_ahead, "ES", kSpan, nullptr);
    CHECK(redo.from_cache);  // meta and raw still there, only the csv changed
    write_file_atomic(single.csv_path.string(),
                      convert_payload_to_csv(read_file(single.raw_path.string()), "fix").csv);
    CHECK(verify_cache(config).all_ok());

    std::filesystem::remove(single.raw_path);
    report = verify_cache(config);
    CHECK_FALSE(report.all_ok());
    int unverifiable = 0;
    for (const auto& e : report.entries)
        if (e.status == VerifyStatus::unverifiable) ++unverifiable;
    CHECK(unverifiable == 1);

    // The joined CSV is checked against a fresh five-way join.
    std::string joined_csv = read_file(joined.csv_path.string());
    joined_csv[joined_csv.size() - 2] = '9';
    write_file_atomic(joined.csv_path.string(), joined_csv);
    report = verify_cache(config);
    int joined_bad = 0;
    for (const auto& e : report.entries)
        if (e.status == VerifyStatus::mismatch && e.csv_path == joined.csv_path) ++joined_bad;
    CHECK(joined_bad == 1);
}
