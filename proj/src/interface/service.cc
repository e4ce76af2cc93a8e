#include "hdpd/interface/service.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>
#include <utility>

#include "hdpd/cohort/csv_io.h"
#include "hdpd/common/error.h"
#include "hdpd/common/json_file.h"
#include "hdpd/common/logging.h"
#include "hdpd/diagram/analytics.h"
#include "hdpd/diagram/builder.h"
#include "hdpd/diagram/diagram_io.h"
#include "hdpd/diagram/ward.h"
#include "httplib.h"

namespace hdpd::interface {

using nlohmann::json;

namespace {

// Carries the HTTP status out of the handlers.
class HttpError : public Error {
 public:
  HttpError(int status, std::string kind, const std::string& message)
      : Error(message), status_(status), kind_(std::move(kind)) {}
  int status() const { return status_; }
  const std::string& kind() const { return kind_; }

 private:
  int status_;
  std::string kind_;
};

[[noreturn]] void BadRequest(const std::string& message) {
  throw HttpError(400, "bad_request", message);
}

[[noreturn]] void Unprocessable(const std::string& message) {
  throw HttpError(422, "invalid_pair", message);
}

HttpResponse ErrorResponse(int status, const std::string& kind, const std::string& message) {
  return {status, json{{"error", {{"status", status}, {"kind", kind}, {"message", message}}}}.dump()};
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

const json& Field(const json& request, const char* name) {
  if (!request.contains(name)) BadRequest(std::string("missing field '") + name + "'");
  return request.at(name);
}

std::string StringField(const json& request, const char* name) {
  const auto& v = Field(request, name);
  if (!v.is_string()) BadRequest(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

bool ParseBool(const std::string& text, const char* name) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  BadRequest(std::string("parameter '") + name + "' must be true or false");
}

std::size_t ParseCount(const std::string& text, const char* name) {
  std::size_t pos = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v < 1) {
    BadRequest(std::string("parameter '") + name + "' must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::string QueryValue(const std::map<std::string, std::string>& query, const char* name) {
  const auto it = query.find(name);
  if (it == query.end() || it->second.empty()) {
    BadRequest(std::string("missing query parameter '") + name + "'");
  }
  return it->second;
}

}  // namespace

ApiSession::ApiSession(cohort::Cohort cohort,
                       std::vector<std::pair<cohort::DiseaseRule, DiseaseModel>> models,
                       ServiceOptions options)
    : cohort_(std::make_unique<const cohort::Cohort>(std::move(cohort))),
      options_(options) {
  if (models.empty()) throw InvalidArgument("the service needs at least one fitted model");
  for (auto& [rule, model] : models) {
    const std::string name = model.disease;
    if (diseases_.count(name)) throw InvalidArgument("duplicate model for '" + name + "'");
    Disease d;
    d.model_hash = ConfigHash(model.ToJson());
    d.session = std::make_unique<DiseaseSession>(*cohort_, std::move(rule), std::move(model));
    diseases_.emplace(name, std::move(d));
  }
}

std::unique_ptr<ApiSession> ApiSession::FromWorkspace(const Workspace& workspace,
                                                      ServiceOptions options) {
  auto cohort = workspace.LoadCohort();
  std::vector<std::pair<cohort::DiseaseRule, DiseaseModel>> models;
  for (const auto& disease : workspace.ModelDiseases()) {
    auto model = workspace.LoadModel(disease);
    auto rule = workspace.LoadRule(model.disease);
    models.emplace_back(std::move(rule), std::move(model));
  }
  if (models.empty()) throw NotFound("workspace has no fitted model");
  return std::make_unique<ApiSession>(std::move(cohort), std::move(models), options);
}

std::vector<std::string> ApiSession::diseases() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : diseases_) out.push_back(name);
  return out;
}

std::size_t ApiSession::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

void ApiSession::ClearCache() const {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

std::string ApiSession::Cached(const std::string& key,
                               const std::function<std::string()>& compute) const {
  {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  // Computed outside the lock; a concurrent duplicate produces the same bytes
  // and the first insertion wins.
  std::string value = compute();
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(value)).first->second;
}

const ApiSession::Disease& ApiSession::Find(const std::string& disease) const {
  const auto it = diseases_.find(disease);
  if (it == diseases_.end()) throw NotFound("unknown disease '" + disease + "'");
  return it->second;
}

std::size_t ApiSession::RecordIndex(const std::string& record_id) const {
  std::optional<std::size_t> idx;
  try {
    idx = cohort_->FindRecord(record_id);
  } catch (const InvalidArgument&) {
    idx.reset();
  }
  if (!idx) throw NotFound("unknown record '" + record_id + "'");
  return *idx;
}

HttpResponse ApiSession::Handle(std::string_view method, std::string_view path,
                                const std::map<std::string, std::string>& query,
                                std::string_view body) const {
  try {
    const auto parts = SplitPath(path);
    auto parse_body = [&] {
      const auto j = ParseJson(body.empty() ? std::string_view("{}") : body, "request body");
      if (!j.is_object()) BadRequest("request body must be a JSON object");
      return j;
    };
    if (method == "GET") {
      if (parts.size() == 1 && parts[0] == "records") return {200, Records(query).dump()};
      if (parts.size() == 1 && parts[0] == "diseases") return {200, Diseases().dump()};
      if (parts.size() == 3 && parts[0] == "records" && parts[2] == "features") {
        return {200, Features(parts[1]).dump()};
      }
      if (parts.size() == 3 && parts[0] == "records" && parts[2] == "timeline") {
        return {200, Timeline(parts[1], query).dump()};
      }
      if (parts.size() == 2 && parts[0] == "analysis" && parts[1] == "contribution") {
        return {200, Contribution(query).dump()};
      }
    } else if (method == "POST") {
      if (parts.size() == 1 && parts[0] == "hdpd") return {200, Hdpd(parse_body()).dump()};
      if (parts.size() == 2 && parts[0] == "hdpd" && parts[1] == "superimpose") {
        return {200, Superimpose(parse_body()).dump()};
      }
      if (parts.size() == 1 && parts[0] == "whatif") return {200, WhatIf(parse_body()).dump()};
    } else {
      return ErrorResponse(405, "method_not_allowed",
                           "method " + std::string(method) + " is not supported");
    }
    return ErrorResponse(404, "not_found", "no endpoint " + std::string(method) + " " +
                                               std::string(path));
  } catch (const HttpError& e) {
    return ErrorResponse(e.status(), e.kind(), e.what());
  } catch (const NotFound& e) {
    return ErrorResponse(404, "not_found", e.what());
  } catch (const ParseError& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const InvalidArgument& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const json::exception& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

json ApiSession::Records(const std::map<std::string, std::string>& query) const {
  const auto it = query.find("participant");
  json records = json::array();
  for (const auto& r : cohort_->records()) {
    if (it != query.end() && r.participant_id != it->second) continue;
    records.push_back({{"id", r.Id()}, {"participant", r.participant_id}, {"year", r.year}});
  }
  return {{"count", records.size()}, {"records", std::move(records)}};
}

json ApiSession::Diseases() const {
  json out = json::array();
  for (const auto& [name, d] : diseases_) {
    const auto& m = d.session->model();
    out.push_back({{"disease", name},
                   {"horizon_years", m.horizon_years},
                   {"threshold", m.model.threshold},
                   {"test_auc", m.test_auc ? json(*m.test_auc) : json(nullptr)},
                   {"k", m.projection.k},
                   {"features", m.model.features()},
                   {"model_hash", d.model_hash}});
  }
  return {{"diseases", std::move(out)}};
}

json ApiSession::Features(const std::string& record_id) const {
  const std::size_t idx = RecordIndex(record_id);
  const auto& record = cohort_->records()[idx];
  json features = json::array();
  const auto& meta = cohort_->features();
  for (std::size_t j = 0; j < meta.size(); ++j) {
    const auto& f = meta[j];
    json item = {{"name", f.name},
                 {"kind", std::string(cohort::ToString(f.kind))},
                 {"unit", f.unit},
                 {"value", record.values[j] ? json(*record.values[j]) : json(nullptr)}};
    if (f.risk_direction) item["risk_direction"] = std::string(cohort::ToString(*f.risk_direction));
    if (f.kind == cohort::FeatureKind::kCategorical) {
      item["levels"] = f.levels;
      if (record.values[j]) item["level"] = f.levels.at(static_cast<std::size_t>(*record.values[j]));
    }
    features.push_back(std::move(item));
  }
  json diseases = json::object();
  for (const auto& [name, d] : diseases_) {
    const auto& session = *d.session;
    const auto view = session.View(idx);
    const double p = session.model().model.Predict(view.values);
    json model_features = json::array();
    for (std::size_t i = 0; i < view.values.size(); ++i) {
      model_features.push_back({{"name", session.features()[i]},
                                {"value", view.values[i]},
                                {"measured", !view.missing[i]},
                                {"discrete", session.space().discrete[i]}});
    }
    diseases[name] = {{"probability", p},
                      {"onset", p >= session.model().model.threshold},
                      {"threshold", session.model().model.threshold},
                      {"model_features", std::move(model_features)}};
  }
  return {{"record", record.Id()},
          {"participant", record.participant_id},
          {"year", record.year},
          {"features", std::move(features)},
          {"diseases", std::move(diseases)}};
}

namespace {

// Canonical /hdpd request with defaults filled in.
json NormalizeHdpd(const json& request, std::size_t default_budget) {
  json r;
  r["record"] = StringField(request, "record");
  r["disease"] = StringField(request, "disease");
  r["var_x"] = StringField(request, "var_x");
  r["var_y"] = StringField(request, "var_y");
  std::string mode = "pmice";
  if (request.contains("mode")) {
    if (!request["mode"].is_string()) BadRequest("field 'mode' must be a string");
    try {
      mode = std::string(diagram::ToString(diagram::ParseDiagramMode(request["mode"].get<std::string>())));
    } catch (const InvalidArgument& e) {
      BadRequest(e.what());
    }
  }
  r["mode"] = mode;
  bool active = true;
  if (request.contains("active")) {
    if (!request["active"].is_boolean()) BadRequest("field 'active' must be a boolean");
    active = request["active"].get<bool>();
  }
  r["active"] = active;
  if (active) {
    std::size_t budget = default_budget;
    if (request.contains("budget")) {
      const auto& b = request["budget"];
      if (!b.is_number_integer() || b.get<long long>() < 1) {
        BadRequest("field 'budget' must be a positive integer");
      }
      budget = b.get<std::size_t>();
    }
    r["budget"] = budget;
  }
  return r;
}

}  // namespace

json ApiSession::CachedDiagram(const json& r) const {
  const auto& d = Find(r["disease"].get<std::string>());
  const std::string key = "hdpd\n" + r.dump() + "\n" + d.model_hash;
  const std::string text = Cached(key, [&] {
    const auto& session = *d.session;
    const std::size_t idx = RecordIndex(r["record"].get<std::string>());
    const std::string var_x = r["var_x"].get<std::string>();
    const std::string var_y = r["var_y"].get<std::string>();
    const auto fx = session.FeatureIndex(var_x);
    if (!fx) throw NotFound("unknown feature '" + var_x + "' for disease '" + session.model().disease + "'");
    const auto fy = session.FeatureIndex(var_y);
    if (!fy) throw NotFound("unknown feature '" + var_y + "' for disease '" + session.model().disease + "'");
    if (*fx == *fy) Unprocessable("var_x and var_y must differ");
    const auto view = session.View(idx);
    for (const auto& [f, name] : {std::pair{*fx, var_x}, std::pair{*fy, var_y}}) {
      if (view.missing[f]) Unprocessable("feature '" + name + "' is not measured in record " + view.id);
    }
    const auto mode = diagram::ParseDiagramMode(r["mode"].get<std::string>());
    const auto ctx = session.Context();
    diagram::Diagram diagram;
    if (r["active"].get<bool>()) {
      diagram::ActiveLearningConfig config;
      config.budget = r["budget"].get<std::size_t>();
      config.initial_points = std::min(config.initial_points, config.budget);
      diagram = diagram::BuildDiagramActive(ctx, view, *fx, *fy, mode, config);
    } else {
      diagram = diagram::BuildDiagramFull(ctx, view, *fx, *fy, mode);
    }
    return diagram::DiagramToJson(diagram).dump();
  });
  return json::parse(text);
}

json ApiSession::Hdpd(const json& request) const {
  return CachedDiagram(NormalizeHdpd(request, options_.default_budget));
}

json ApiSession::Superimpose(const json& request) const {
  const auto& list = Field(request, "diseases");
  if (!list.is_array() || list.empty()) BadRequest("field 'diseases' must be a non-empty array");
  std::set<std::string> names;
  for (const auto& d : list) {
    if (!d.is_string()) BadRequest("disease names must be strings");
    names.insert(d.get<std::string>());
  }
  for (const auto& name : names) Find(name);

  json base = request;
  base.erase("diseases");
  base["disease"] = *names.begin();
  const json normalized = NormalizeHdpd(base, options_.default_budget);
  const std::size_t idx = RecordIndex(normalized["record"].get<std::string>());

  std::vector<diagram::Diagram> diagrams;
  json included = json::array();
  json unavailable = json::array();
  for (const auto& name : names) {
    const auto& session = *Find(name).session;
    std::string reason;
    for (const char* var : {"var_x", "var_y"}) {
      const std::string feature = normalized[var].get<std::string>();
      const auto f = session.FeatureIndex(feature);
      if (!f) {
        reason = "feature '" + feature + "' is not in the model";
        break;
      }
      if (session.View(idx).missing[*f]) {
        reason = "feature '" + feature + "' is not measured in the record";
        break;
      }
    }
    if (reason.empty() && normalized["var_x"] == normalized["var_y"]) {
      reason = "var_x and var_y must differ";
    }
    if (!reason.empty()) {
      unavailable.push_back({{"disease", name}, {"reason", reason}});
      continue;
    }
    json r = normalized;
    r["disease"] = name;
    diagrams.push_back(diagram::DiagramFromJson(CachedDiagram(r)));
    included.push_back(name);
  }
  if (diagrams.empty()) Unprocessable("the pair is unavailable for every requested disease");
  diagram::SuperimposedGrid grid;
  try {
    grid = diagram::Superimpose(diagrams);
  } catch (const InvalidArgument& e) {
    Unprocessable(e.what());
  }
  json out = diagram::SuperimposedToJson(grid);
  out["diseases"] = std::move(included);
  out["unavailable"] = std::move(unavailable);
  out["mode"] = normalized["mode"];
  out["joint_target_exists"] = grid.FreeCells() > 0;
  return out;
}

json ApiSession::WhatIf(const json& request) const {
  const std::string record_id = StringField(request, "record");
  const std::string disease = StringField(request, "disease");
  const auto& session = *Find(disease).session;
  const std::size_t idx = RecordIndex(record_id);
  auto view = session.View(idx);
  const double baseline = session.model().model.Predict(view.values);
  if (request.contains("overrides")) {
    const auto& overrides = request["overrides"];
    if (!overrides.is_object()) BadRequest("field 'overrides' must be an object");
    for (const auto& [name, value] : overrides.items()) {
      const auto f = session.FeatureIndex(name);
      if (!f) throw NotFound("unknown feature '" + name + "' for disease '" + disease + "'");
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        BadRequest("override for '" + name + "' must be a finite number");
      }
      view.values[*f] = value.get<double>();
    }
  }
  const double p = session.model().model.Predict(view.values);
  json values = json::object();
  for (std::size_t i = 0; i < view.values.size(); ++i) values[session.features()[i]] = view.values[i];
  return {{"record", view.id},
          {"disease", disease},
          {"probability", p},
          {"baseline_probability", baseline},
          {"threshold", session.model().model.threshold},
          {"onset", p >= session.model().model.threshold},
          {"values", std::move(values)}};
}

json ApiSession::Timeline(const std::string& record_id,
                          const std::map<std::string, std::string>& query) const {
  const std::size_t idx = RecordIndex(record_id);
  json base = {{"record", record_id},
               {"disease", QueryValue(query, "disease")},
               {"var_x", QueryValue(query, "var_x")},
               {"var_y", QueryValue(query, "var_y")}};
  if (const auto it = query.find("mode"); it != query.end()) base["mode"] = it->second;
  if (const auto it = query.find("active"); it != query.end()) {
    base["active"] = ParseBool(it->second, "active");
  }
  if (const auto it = query.find("budget"); it != query.end()) {
    base["budget"] = ParseCount(it->second, "budget");
  }
  const json normalized = NormalizeHdpd(base, options_.default_budget);
  const auto& session = *Find(normalized["disease"].get<std::string>()).session;
  const std::string var_x = normalized["var_x"].get<std::string>();
  const std::string var_y = normalized["var_y"].get<std::string>();
  const auto fx = session.FeatureIndex(var_x);
  if (!fx) throw NotFound("unknown feature '" + var_x + "'");
  const auto fy = session.FeatureIndex(var_y);
  if (!fy) throw NotFound("unknown feature '" + var_y + "'");
  if (*fx == *fy) Unprocessable("var_x and var_y must differ");

  const auto& participant = cohort_->records()[idx].participant_id;
  json years = json::array();
  for (const std::size_t r : cohort_->ParticipantRecords(participant)) {
    const auto view = session.View(r);
    json entry = {{"year", view.year},
                  {"record", view.id},
                  {"x", view.missing[*fx] ? json(nullptr) : json(view.values[*fx])},
                  {"y", view.missing[*fy] ? json(nullptr) : json(view.values[*fy])}};
    if (view.missing[*fx] || view.missing[*fy]) {
      entry["diagram"] = nullptr;
      entry["reason"] = "pair not measured in this year";
    } else {
      json req = normalized;
      req["record"] = view.id;
      entry["diagram"] = CachedDiagram(req);
    }
    years.push_back(std::move(entry));
  }
  return {{"participant", participant},
          {"record", record_id},
          {"disease", normalized["disease"]},
          {"var_x", var_x},
          {"var_y", var_y},
          {"mode", normalized["mode"]},
          {"years", std::move(years)}};
}

json ApiSession::Contribution(const std::map<std::string, std::string>& query) const {
  const std::string disease = QueryValue(query, "disease");
  const auto& d = Find(disease);
  std::size_t limit = options_.contribution_records;
  if (const auto it = query.find("limit"); it != query.end()) limit = ParseCount(it->second, "limit");
  auto mode = diagram::DiagramMode::kPmice;
  if (const auto it = query.find("mode"); it != query.end()) {
    try {
      mode = diagram::ParseDiagramMode(it->second);
    } catch (const InvalidArgument& e) {
      BadRequest(e.what());
    }
  }
  const json key_body = {{"disease", disease}, {"limit", limit}, {"mode", diagram::ToString(mode)}};
  const std::string key = "contribution\n" + key_body.dump() + "\n" + d.model_hash;
  const std::string text = Cached(key, [&] {
    auto records = d.session->PredictedOnsetTest();
    if (records.size() > limit) records.resize(limit);
    const auto matrix = ContributionAnalysis(*d.session, records, mode);
    std::optional<diagram::Dendrogram> tree;
    if (matrix.records.size() >= 2) tree = diagram::WardCluster(matrix.values);
    json out = diagram::ContributionToJson(matrix, tree ? &*tree : nullptr);
    out["disease"] = disease;
    out["mode"] = diagram::ToString(mode);
    if (!tree) out["cluster_order"] = matrix.records;
    return out.dump();
  });
  return json::parse(text);
}

void Serve(const ApiSession& session, const std::string& host, int port,
           const std::atomic<bool>* stop) {
  httplib::Server server;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto handler = [&session](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto r = session.Handle(req.method, req.path, query, req.body);
    Log().info("{} {} -> {}", req.method, req.path, r.status);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/.*)", handler);
  server.Post(R"(/.*)", handler);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  Log().info("serving {} disease model(s) on {}:{}", session.diseases().size(), host, port);
  std::atomic<bool> done = false;
  std::thread watcher;
  if (stop) {
    watcher = std::thread([&server, &done, stop] {
      while (!stop->load() && !done.load()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
      server.stop();
    });
  }
  const bool ok = server.listen(host, port);
  done = true;
  if (watcher.joinable()) watcher.join();
  if (!ok) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace hdpd::interface
