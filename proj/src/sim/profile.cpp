#include "minilab/sim/profile.hpp"

#include <cmath>

#include "minilab/error.hpp"

namespace minilab::sim {

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check_range(const LatencyRange& r, const std::string& what, const std::string& name) {
  if (r.min.count() < 0 || r.max < r.min) {
    throw Error("INVALID_PROFILE", "profile '" + name + "': " + what + " latency range is invalid");
  }
}

Json range_json(const LatencyRange& r) { return Json{{"min_s", r.min.count()}, {"max_s", r.max.count()}}; }

LatencyRange range_from(const Json& j, LatencyRange fallback) {
  if (j.is_null()) return fallback;
  return {Duration{j.at("min_s").get<std::int64_t>()}, Duration{j.at("max_s").get<std::int64_t>()}};
}

}  // namespace

void validate_profile(const BehaviorProfile& p, const std::string& name) {
  const std::pair<const char*, double> probs[] = {{"p_open", p.p_open},
                                                   {"p_click_given_open", p.p_click_given_open},
                                                   {"p_reply_given_open", p.p_reply_given_open},
                                                   {"p_unsub_given_open", p.p_unsub_given_open}};
  for (const auto& [field, v] : probs) {
    if (!is_prob(v)) throw Error("INVALID_PROFILE", "profile '" + name + "': " + field + " must be in [0, 1]");
  }
  check_range(p.open_latency, "open", name);
  check_range(p.click_latency, "click", name);
  check_range(p.reply_latency, "reply", name);
}

BehaviorProfile calibrate_from_rates(double open_pct, double ctr_pct, double reply_pct, double p_unsub_given_open) {
  BehaviorProfile p;
  p.p_open = open_pct / 100.0;
  if (!(p.p_open > 0.0)) {
    if (ctr_pct != 0.0 || reply_pct != 0.0) {
      throw Error("INVALID_PROFILE", "clicks or replies need a positive open rate");
    }
  } else {
    p.p_click_given_open = ctr_pct / open_pct;
    p.p_reply_given_open = reply_pct / open_pct;
  }
  p.p_unsub_given_open = p_unsub_given_open;
  validate_profile(p, "calibrated");
  return p;
}

void to_json(Json& j, const BehaviorProfile& p) {
  j = Json{{"p_open", p.p_open},
           {"p_click_given_open", p.p_click_given_open},
           {"p_reply_given_open", p.p_reply_given_open},
           {"p_unsub_given_open", p.p_unsub_given_open},
           {"latency",
            {{"open", range_json(p.open_latency)},
             {"click", range_json(p.click_latency)},
             {"reply", range_json(p.reply_latency)}}}};
}

BehaviorProfile profile_from_json(const Json& j, const std::string& name) {
  BehaviorProfile p;
  try {
    const double unsub = j.value("p_unsub_given_open", 0.01);
    if (j.contains("calibrate")) {
      const Json& c = j.at("calibrate");
      p = calibrate_from_rates(c.at("open_rate").get<double>(), c.at("ctr").get<double>(),
                               c.at("response_rate").get<double>(), unsub);
    } else {
      p.p_open = j.at("p_open").get<double>();
      p.p_click_given_open = j.value("p_click_given_open", 0.0);
      p.p_reply_given_open = j.value("p_reply_given_open", 0.0);
      p.p_unsub_given_open = unsub;
    }
    if (auto it = j.find("latency"); it != j.end()) {
      p.open_latency = range_from(it->value("open", Json()), p.open_latency);
      p.click_latency = range_from(it->value("click", Json()), p.click_latency);
      p.reply_latency = range_from(it->value("reply", Json()), p.reply_latency);
    }
  } catch (const nlohmann::json::exception& e) {
    json_util::throw_parse_error(("profile '" + name + "'").c_str(), e.what());
  }
  validate_profile(p, name);
  return p;
}

ProfileMap parse_profiles(const Json& j) {
  if (!j.is_object()) throw Error("PARSE_ERROR", "profile file must be a JSON object keyed by name");
  ProfileMap out;
  for (const auto& [name, v] : j.items()) out[name] = profile_from_json(v, name);
  return out;
}

ProfileMap load_profiles(const std::string& path) { return parse_profiles(json_util::load_file(path)); }

}  // namespace minilab::sim
