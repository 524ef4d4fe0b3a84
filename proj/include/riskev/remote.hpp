#pragma once

// HTTP JSON client for the model service. Every request and response carries
// a top-level "v" protocol version.
//
//   POST /score/risk        {"v":1,"texts":[..]}    -> {"v":1,"probs":[..]}
//   POST /score/sentiment   {"v":1,"texts":[..]}    -> {"v":1,"dists":[[neg,neu,pos],..]}
//   POST /generate/terms    {"v":1,"posts_text":s}  -> {"v":1,"raw_output":s}
//   POST /generate/summary  {"v":1,"posts_text":s}  -> {"v":1,"summary":s}
//   GET  /health                                    -> {"v":1,...}

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/generator.hpp"
#include "riskev/scoring.hpp"

namespace riskev {

inline constexpr int kProtocolVersion = 1;

struct RemoteConfig {
    std::string endpoint;  // e.g. "http://127.0.0.1:8000"
    std::chrono::milliseconds timeout{30000};
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 4;
};

class RemoteModelClient final : public RiskScorer, public SentimentScorer, public TextGenerator {
public:
    explicit RemoteModelClient(RemoteConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty()) throw InputError("remote endpoint is not configured");
        if (config_.batch_size == 0) throw InputError("remote batch_size must be positive");
        if (config_.max_in_flight == 0) config_.max_in_flight = 1;
    }

    const RemoteConfig& config() const noexcept { return config_; }

    std::vector<RiskScore> score_risk(std::span<const std::string> texts) const override {
        return run_batches(texts, "/score/risk", [](const nlohmann::json& body, std::size_t expected) {
            const auto& probs = field(body, "probs");
            if (!probs.is_array() || probs.size() != expected)
                throw TransportError(TransportError::Kind::protocol, "/score/risk: response not aligned with request");
            std::vector<RiskScore> out;
            for (const auto& p : probs) {
                if (!p.is_number()) throw TransportError(TransportError::Kind::protocol, "/score/risk: non-numeric probability");
                double x = p.get<double>();
                if (!(x >= 0.0 && x <= 1.0))
                    throw TransportError(TransportError::Kind::protocol, "/score/risk: probability outside [0,1]");
                out.push_back({x});
            }
            return out;
        });
    }

    std::vector<SentimentScore> score_sentiment(std::span<const std::string> texts) const override {
        return run_batches(texts, "/score/sentiment", [](const nlohmann::json& body, std::size_t expected) {
            const auto& dists = field(body, "dists");
            if (!dists.is_array() || dists.size() != expected)
                throw TransportError(TransportError::Kind::protocol, "/score/sentiment: response not aligned with request");
            std::vector<SentimentScore> out;
            for (const auto& d : dists) {
                if (!d.is_array() || d.size() != 3 || !d[0].is_number() || !d[1].is_number() || !d[2].is_number())
                    throw TransportError(TransportError::Kind::protocol, "/score/sentiment: distribution must be 3 numbers");
                SentimentScore s{d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
                bool bounded = s.p_negative >= 0 && s.p_negative <= 1 && s.p_neutral >= 0 && s.p_neutral <= 1 &&
                               s.p_positive >= 0 && s.p_positive <= 1;
                if (!bounded || std::abs(s.p_negative + s.p_neutral + s.p_positive - 1.0) > 1e-6)
                    throw TransportError(TransportError::Kind::protocol, "/score/sentiment: distribution off the simplex");
                out.push_back(s);
            }
            return out;
        });
    }

    std::string generate_terms(std::string_view posts_text) const override {
        return generate("/generate/terms", "raw_output", posts_text);
    }

    std::string generate_summary(std::string_view posts_text) const override {
        return generate("/generate/summary", "summary", posts_text);
    }

    nlohmann::json health() const {
        auto client = make_client();
        auto res = client.Get("/health");
        return check(res, "/health");
    }

private:
    httplib::Client make_client() const {
        httplib::Client client(config_.endpoint);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        return client;
    }

    static const nlohmann::json& field(const nlohmann::json& body, const char* key) {
        auto it = body.find(key);
        if (it == body.end())
            throw TransportError(TransportError::Kind::protocol, std::string("response lacks \"") + key + "\"");
        return *it;
    }

    static nlohmann::json check(const httplib::Result& res, const std::string& path) {
        if (!res) {
            auto err = res.error();
            auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                            ? TransportError::Kind::timeout
                            : TransportError::Kind::connection;
            throw TransportError(kind, path + ": " + httplib::to_string(err));
        }
        if (res->status != 200)
            throw TransportError(TransportError::Kind::http_status,
                                 path + ": HTTP " + std::to_string(res->status), res->status);
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
            throw TransportError(TransportError::Kind::protocol, path + ": response is not JSON");
        }
        if (!body.is_object() || !body.contains("v") || body["v"] != kProtocolVersion)
            throw TransportError(TransportError::Kind::protocol, path + ": protocol version mismatch");
        return body;
    }

    nlohmann::json post(const std::string& path, const nlohmann::json& request) const {
        auto client = make_client();
        auto res = client.Post(path, request.dump(), "application/json");
        return check(res, path);
    }

    std::string generate(const std::string& path, const char* key, std::string_view posts_text) const {
        nlohmann::json request{{"v", kProtocolVersion}, {"posts_text", std::string(posts_text)}};
        auto body = post(path, request);
        const auto& out = field(body, key);
        if (!out.is_string()) throw TransportError(TransportError::Kind::protocol, path + ": output must be a string");
        return out.get<std::string>();
    }

    template <typename Parse, typename Out = std::invoke_result_t<Parse, const nlohmann::json&, std::size_t>>
    Out run_batches(std::span<const std::string> texts, const std::string& path, Parse parse) const {
        Out out;
        if (texts.empty()) return out;
        auto fetch = [&](std::size_t begin, std::size_t end) {
            nlohmann::json request{{"v", kProtocolVersion}, {"texts", nlohmann::json::array()}};
            for (std::size_t i = begin; i < end; ++i) request["texts"].push_back(texts[i]);
            return parse(post(path, request), end - begin);
        };
        // batches dispatched in waves of max_in_flight, merged in order
        std::vector<std::pair<std::size_t, std::size_t>> ranges;
        for (std::size_t b = 0; b < texts.size(); b += config_.batch_size)
            ranges.emplace_back(b, std::min(texts.size(), b + config_.batch_size));
        for (std::size_t w = 0; w < ranges.size(); w += config_.max_in_flight) {
            std::vector<std::future<Out>> wave;
            for (std::size_t k = w; k < std::min(ranges.size(), w + config_.max_in_flight); ++k)
                wave.push_back(std::async(std::launch::async, fetch, ranges[k].first, ranges[k].second));
            for (auto& f : wave) {
                auto part = f.get();
                out.insert(out.end(), part.begin(), part.end());
            }
        }
        return out;
    }

    RemoteConfig config_;
};

}  // namespace riskev
