#include "qtrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qtrack/errors.hpp"

namespace qtrack {

using nlohmann::json;

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Fig5: return "fig5";
    case ExperimentKind::Fig6: return "fig6";
    case ExperimentKind::VerifyOrder: return "verify-order";
    case ExperimentKind::Custom: return "custom";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& msg, const std::string& where) {
  throw ConfigError(msg, where);
}

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "'", where);
  }
}

double get_number(const json& obj, const std::string& key,
                  const std::string& where) {
  if (!obj.contains(key)) fail("missing key '" + key + "'", where);
  if (!obj[key].is_number()) fail("'" + key + "' must be a number", where);
  return obj[key].get<double>();
}

Distribution parse_distribution(const json& j, const std::string& where) {
  if (!j.is_object()) fail("distribution literal must be an object", where);
  if (!j.contains("kind")) fail("distribution needs a 'kind'", where);
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "exponential") {
      expect_keys(j, {"kind", "rate"}, where);
      return Distribution::exponential(get_number(j, "rate", where));
    }
    if (kind == "weibull") {
      expect_keys(j, {"kind", "shape", "scale"}, where);
      return Distribution::weibull(get_number(j, "shape", where),
                                   get_number(j, "scale", where));
    }
    if (kind == "uniform") {
      expect_keys(j, {"kind", "lo", "hi"}, where);
      return Distribution::uniform(get_number(j, "lo", where),
                                   get_number(j, "hi", where));
    }
    if (kind == "deterministic") {
      expect_keys(j, {"kind", "value"}, where);
      return Distribution::deterministic(get_number(j, "value", where));
    }
  } catch (const std::invalid_argument& e) {
    fail(e.what(), where);
  }
  fail("unknown distribution kind '" + kind + "'", where);
}

json distribution_to_json(const Distribution& d) {
  switch (d.kind()) {
    case DistKind::Exponential:
      return {{"kind", "exponential"}, {"rate", d.rate()}};
    case DistKind::Weibull:
      return {{"kind", "weibull"}, {"shape", d.shape()}, {"scale", d.scale()}};
    case DistKind::Uniform:
      return {{"kind", "uniform"}, {"lo", d.lo()}, {"hi", d.hi()}};
    case DistKind::Deterministic:
      return {{"kind", "deterministic"}, {"value", d.value()}};
  }
  return {};
}

QueueDef parse_queue(const json& j, const std::string& where, int index) {
  if (!j.is_object()) fail("queue must be an object", where);
  expect_keys(j, {"id", "arrival", "service", "discipline"}, where);
  if (!j.contains("arrival") || !j.contains("service"))
    fail("queue needs 'arrival' and 'service'", where);
  Discipline disc = Discipline::InfiniteServer;
  if (j.contains("discipline")) {
    const std::string d = j["discipline"].get<std::string>();
    if (d == "infinite-server")
      disc = Discipline::InfiniteServer;
    else if (d == "processor-sharing")
      disc = Discipline::ProcessorSharing;
    else
      fail("unknown discipline '" + d + "'", where + "/discipline");
  }
  QueueDef q;
  q.id = j.contains("id") ? j["id"].get<std::string>()
                          : "q" + std::to_string(index);
  try {
    q.spec = make_queue(parse_distribution(j["arrival"], where + "/arrival"),
                        parse_distribution(j["service"], where + "/service"),
                        disc);
  } catch (const std::invalid_argument& e) {
    fail(e.what(), where);
  }
  return q;
}

json queue_to_json(const QueueDef& q) {
  return {{"id", q.id},
          {"arrival", distribution_to_json(q.spec.arrival)},
          {"service", distribution_to_json(q.spec.service)},
          {"discipline", q.spec.discipline == Discipline::ProcessorSharing
                             ? "processor-sharing"
                             : "infinite-server"}};
}

Policy parse_policy(const json& j, const std::string& where) {
  try {
    return policy_from_name(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(e.what(), where);
  }
}

long parse_positive_long(const json& obj, const std::string& key,
                         long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    fail("'" + key + "' must be an integer", where);
  const long v = obj[key].get<long>();
  if (v < 1) fail("'" + key + "' must be positive", where + "/" + key);
  return v;
}

std::vector<double> parse_sorted_grid(const json& obj, const std::string& key,
                                      std::vector<double> fallback,
                                      const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array() || obj[key].empty())
    fail("'" + key + "' must be a nonempty array", where + "/" + key);
  std::vector<double> grid;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) fail("'" + key + "' entries must be numbers", where);
    grid.push_back(v.get<double>());
    if (grid.back() <= 0) fail("'" + key + "' entries must be positive", where);
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      fail("'" + key + "' must be strictly increasing", where + "/" + key);
  return grid;
}

}  // namespace

std::string config_hash_hex(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string distribution_to_json_text(const Distribution& d) {
  return distribution_to_json(d).dump();
}

namespace {

json canonical_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = experiment_kind_name(cfg.kind);
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  switch (cfg.kind) {
    case ExperimentKind::Fig5: {
      j["fig5"] = {{"shapes", cfg.fig5.shapes},
                   {"arrival_rate", cfg.fig5.arrival_rate},
                   {"service_rates", cfg.fig5.service_rates},
                   {"transactions", cfg.fig5.transactions},
                   {"runs", cfg.fig5.runs}};
      std::vector<std::string> pol;
      for (Policy p : cfg.fig5.policies) pol.push_back(policy_name(p));
      j["fig5"]["policies"] = pol;
      break;
    }
    case ExperimentKind::Fig6:
      j["fig6"] = {{"n_queues", cfg.fig6.n_queues},
                   {"budget", cfg.fig6.budget},
                   {"configurations", cfg.fig6.configurations},
                   {"t_max", cfg.fig6.t_max},
                   {"service_rate_min", cfg.fig6.service_rate_min},
                   {"shape_min", cfg.fig6.shape_min},
                   {"shape_max", cfg.fig6.shape_max},
                   {"arrival_rate", cfg.fig6.arrival_rate},
                   {"transactions", cfg.fig6.transactions},
                   {"runs", cfg.fig6.runs},
                   {"policy", policy_name(cfg.fig6.policy)}};
      break;
    case ExperimentKind::VerifyOrder: {
      json pairs = json::array();
      for (const PairDef& p : cfg.verify.pairs)
        pairs.push_back({{"a", queue_to_json(p.a)},
                         {"b", queue_to_json(p.b)},
                         {"policy", policy_name(p.policy)}});
      j["verify"] = {{"pairs", pairs},
                     {"transactions", cfg.verify.transactions},
                     {"runs", cfg.verify.runs},
                     {"order_samples", cfg.verify.order_samples}};
      break;
    }
    case ExperimentKind::Custom: {
      json queues = json::array();
      for (const QueueDef& q : cfg.custom.queues) queues.push_back(queue_to_json(q));
      std::vector<std::string> pol;
      for (Policy p : cfg.custom.policies) pol.push_back(policy_name(p));
      j["custom"] = {{"queues", queues},
                     {"transactions", cfg.custom.transactions},
                     {"runs", cfg.custom.runs},
                     {"policies", pol},
                     {"budget", cfg.custom.budget}};
      break;
    }
  }
  return j;
}

}  // namespace

void refresh_config_identity(ExperimentConfig& cfg) {
  cfg.canonical = canonical_json(cfg).dump();
  cfg.config_hash = config_hash_hex(cfg.canonical);
}

namespace {
ExperimentConfig parse_config_object(const json& j);
}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what(), "");
  }
  try {
    return parse_config_object(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what(), "");
  }
}

namespace {
ExperimentConfig parse_config_object(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object", "/");

  expect_keys(j,
              {"kind", "seed", "jobs", "out", "fig5", "fig6", "verify",
               "custom"},
              "/");
  if (!j.contains("kind")) fail("'kind' is mandatory", "/");

  ExperimentConfig cfg;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "fig5")
    cfg.kind = ExperimentKind::Fig5;
  else if (kind == "fig6")
    cfg.kind = ExperimentKind::Fig6;
  else if (kind == "verify-order")
    cfg.kind = ExperimentKind::VerifyOrder;
  else if (kind == "custom")
    cfg.kind = ExperimentKind::Custom;
  else
    fail("unknown experiment kind '" + kind + "'", "/kind");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      fail("'seed' must be a nonnegative integer", "/seed");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_integer() || j["jobs"].get<long>() < 1)
      fail("'jobs' must be a positive integer", "/jobs");
    cfg.jobs = j["jobs"].get<int>();
  }
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();

  for (const char* section : {"fig5", "fig6", "verify", "custom"}) {
    if (j.contains(section) &&
        section != std::string(experiment_kind_name(cfg.kind)) &&
        !(cfg.kind == ExperimentKind::VerifyOrder &&
          section == std::string("verify")))
      fail(std::string("section '") + section + "' does not match kind", "/");
  }

  if (cfg.kind == ExperimentKind::Fig5 && j.contains("fig5")) {
    const json& f = j["fig5"];
    expect_keys(f,
                {"shapes", "arrival_rate", "service_rates", "transactions",
                 "runs", "policies"},
                "/fig5");
    cfg.fig5.shapes =
        parse_sorted_grid(f, "shapes", cfg.fig5.shapes, "/fig5");
    cfg.fig5.service_rates =
        parse_sorted_grid(f, "service_rates", cfg.fig5.service_rates, "/fig5");
    if (f.contains("arrival_rate")) {
      cfg.fig5.arrival_rate = get_number(f, "arrival_rate", "/fig5");
      if (cfg.fig5.arrival_rate <= 0)
        fail("'arrival_rate' must be positive", "/fig5/arrival_rate");
    }
    cfg.fig5.transactions =
        parse_positive_long(f, "transactions", cfg.fig5.transactions, "/fig5");
    cfg.fig5.runs = static_cast<int>(
        parse_positive_long(f, "runs", cfg.fig5.runs, "/fig5"));
    if (f.contains("policies")) {
      if (!f["policies"].is_array() || f["policies"].empty())
        fail("'policies' must be a nonempty array", "/fig5/policies");
      cfg.fig5.policies.clear();
      for (const auto& p : f["policies"])
        cfg.fig5.policies.push_back(parse_policy(p, "/fig5/policies"));
    }
  } else if (cfg.kind == ExperimentKind::Fig6 && j.contains("fig6")) {
    const json& f = j["fig6"];
    expect_keys(f,
                {"n_queues", "budget", "configurations", "t_max",
                 "service_rate_min", "shape_min", "shape_max", "arrival_rate",
                 "transactions", "runs", "policy"},
                "/fig6");
    cfg.fig6.n_queues = static_cast<int>(
        parse_positive_long(f, "n_queues", cfg.fig6.n_queues, "/fig6"));
    if (f.contains("budget")) {
      if (!f["budget"].is_number_integer() || f["budget"].get<long>() < 0)
        fail("'budget' must be a nonnegative integer", "/fig6/budget");
      cfg.fig6.budget = f["budget"].get<int>();
    }
    if (cfg.fig6.budget > cfg.fig6.n_queues)
      fail("'budget' cannot exceed 'n_queues'", "/fig6/budget");
    cfg.fig6.configurations = static_cast<int>(parse_positive_long(
        f, "configurations", cfg.fig6.configurations, "/fig6"));
    cfg.fig6.t_max = parse_sorted_grid(f, "t_max", cfg.fig6.t_max, "/fig6");
    if (f.contains("service_rate_min")) {
      cfg.fig6.service_rate_min = get_number(f, "service_rate_min", "/fig6");
      if (cfg.fig6.service_rate_min <= 0)
        fail("'service_rate_min' must be positive", "/fig6/service_rate_min");
    }
    for (double t : cfg.fig6.t_max)
      if (t < cfg.fig6.service_rate_min)
        fail("'t_max' entries must be >= service_rate_min", "/fig6/t_max");
    if (f.contains("shape_min"))
      cfg.fig6.shape_min = get_number(f, "shape_min", "/fig6");
    if (f.contains("shape_max"))
      cfg.fig6.shape_max = get_number(f, "shape_max", "/fig6");
    if (cfg.fig6.shape_min <= 0 || cfg.fig6.shape_max < cfg.fig6.shape_min)
      fail("shape range must satisfy 0 < shape_min <= shape_max",
           "/fig6/shape_min");
    if (f.contains("arrival_rate")) {
      cfg.fig6.arrival_rate = get_number(f, "arrival_rate", "/fig6");
      if (cfg.fig6.arrival_rate <= 0)
        fail("'arrival_rate' must be positive", "/fig6/arrival_rate");
    }
    cfg.fig6.transactions =
        parse_positive_long(f, "transactions", cfg.fig6.transactions, "/fig6");
    cfg.fig6.runs =
        static_cast<int>(parse_positive_long(f, "runs", cfg.fig6.runs, "/fig6"));
    if (f.contains("policy"))
      cfg.fig6.policy = parse_policy(f["policy"], "/fig6/policy");
  } else if (cfg.kind == ExperimentKind::VerifyOrder && j.contains("verify")) {
    const json& f = j["verify"];
    expect_keys(f, {"pairs", "transactions", "runs", "order_samples"},
                "/verify");
    if (f.contains("pairs")) {
      if (!f["pairs"].is_array()) fail("'pairs' must be an array", "/verify");
      int idx = 0;
      for (const auto& pj : f["pairs"]) {
        const std::string where = "/verify/pairs/" + std::to_string(idx);
        expect_keys(pj, {"a", "b", "policy"}, where);
        if (!pj.contains("a") || !pj.contains("b"))
          fail("pair needs 'a' and 'b' queues", where);
        PairDef p;
        p.a = parse_queue(pj["a"], where + "/a", 2 * idx);
        p.b = parse_queue(pj["b"], where + "/b", 2 * idx + 1);
        if (pj.contains("policy"))
          p.policy = parse_policy(pj["policy"], where + "/policy");
        cfg.verify.pairs.push_back(std::move(p));
        ++idx;
      }
    }
    cfg.verify.transactions = parse_positive_long(
        f, "transactions", cfg.verify.transactions, "/verify");
    cfg.verify.runs = static_cast<int>(
        parse_positive_long(f, "runs", cfg.verify.runs, "/verify"));
    cfg.verify.order_samples = parse_positive_long(
        f, "order_samples", cfg.verify.order_samples, "/verify");
  } else if (cfg.kind == ExperimentKind::Custom) {
    if (!j.contains("custom"))
      fail("kind 'custom' requires a 'custom' section", "/");
    const json& f = j["custom"];
    expect_keys(f, {"queues", "transactions", "runs", "policies", "budget"},
                "/custom");
    if (!f.contains("queues") || !f["queues"].is_array() ||
        f["queues"].empty())
      fail("'queues' must be a nonempty array", "/custom/queues");
    int idx = 0;
    for (const auto& qj : f["queues"]) {
      cfg.custom.queues.push_back(
          parse_queue(qj, "/custom/queues/" + std::to_string(idx), idx));
      ++idx;
    }
    cfg.custom.transactions = parse_positive_long(
        f, "transactions", cfg.custom.transactions, "/custom");
    cfg.custom.runs = static_cast<int>(
        parse_positive_long(f, "runs", cfg.custom.runs, "/custom"));
    if (f.contains("policies")) {
      if (!f["policies"].is_array() || f["policies"].empty())
        fail("'policies' must be a nonempty array", "/custom/policies");
      cfg.custom.policies.clear();
      for (const auto& p : f["policies"])
        cfg.custom.policies.push_back(parse_policy(p, "/custom/policies"));
    }
    if (f.contains("budget")) {
      if (!f["budget"].is_number_integer() || f["budget"].get<long>() < 0)
        fail("'budget' must be a nonnegative integer", "/custom/budget");
      cfg.custom.budget = f["budget"].get<int>();
      if (cfg.custom.budget > static_cast<int>(cfg.custom.queues.size()))
        fail("'budget' cannot exceed the queue count", "/custom/budget");
    }
  }

  refresh_config_identity(cfg);
  return cfg;
}
}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, "");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace qtrack
