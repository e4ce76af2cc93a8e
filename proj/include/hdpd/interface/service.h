#ifndef HDPD_INTERFACE_SERVICE_H_
#define HDPD_INTERFACE_SERVICE_H_

#include <atomic>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/interface/pipeline.h"
#include "hdpd/interface/workspace.h"
#include "json.hpp"

namespace hdpd::interface {

struct HttpResponse {
  int status = 200;
  std::string body;
};

struct ServiceOptions {
  std::size_t default_budget = 50;
  // Predicted-onset test records used by /analysis/contribution when the
  // request gives no limit.
  std::size_t contribution_records = 20;
};

// Read-only HTTP API over one cohort and its disease models. Handle() is
// usable without a socket; Serve() binds it to a port. Responses are JSON;
// errors carry {"error": {"status", "kind", "message"}}.
//
//   GET  /records[?participant=]
//   GET  /diseases
//   GET  /records/{id}/features
//   POST /hdpd              {record, disease, var_x, var_y, mode?, active?, budget?}
//   POST /hdpd/superimpose  {record, diseases[], var_x, var_y, mode?, active?, budget?}
//   POST /whatif            {record, disease, overrides?{feature: value}}
//   GET  /records/{id}/timeline?disease&var_x&var_y[&mode&active&budget]
//   GET  /analysis/contribution?disease[&limit&mode]
//
// Unknown record, disease or feature: 404. A pair the diagram cannot be built
// for (same variable twice, unmeasured in the record): 422. Malformed
// request: 400.
class ApiSession {
 public:
  ApiSession(cohort::Cohort cohort,
             std::vector<std::pair<cohort::DiseaseRule, DiseaseModel>> models,
             ServiceOptions options = {});
  static std::unique_ptr<ApiSession> FromWorkspace(const Workspace& workspace,
                                                   ServiceOptions options = {});

  ApiSession(const ApiSession&) = delete;
  ApiSession& operator=(const ApiSession&) = delete;

  HttpResponse Handle(std::string_view method, std::string_view path,
                      const std::map<std::string, std::string>& query,
                      std::string_view body) const;

  std::size_t cache_size() const;
  void ClearCache() const;

  const cohort::Cohort& cohort() const { return *cohort_; }
  std::vector<std::string> diseases() const;

 private:
  struct Disease {
    std::unique_ptr<DiseaseSession> session;
    std::string model_hash;
  };

  nlohmann::json Records(const std::map<std::string, std::string>& query) const;
  nlohmann::json Diseases() const;
  nlohmann::json Features(const std::string& record_id) const;
  nlohmann::json Hdpd(const nlohmann::json& request) const;
  nlohmann::json Superimpose(const nlohmann::json& request) const;
  nlohmann::json WhatIf(const nlohmann::json& request) const;
  nlohmann::json Timeline(const std::string& record_id,
                          const std::map<std::string, std::string>& query) const;
  nlohmann::json Contribution(const std::map<std::string, std::string>& query) const;

  const Disease& Find(const std::string& disease) const;
  std::size_t RecordIndex(const std::string& record_id) const;
  // Diagram JSON through the cache.
  nlohmann::json CachedDiagram(const nlohmann::json& request) const;
  std::string Cached(const std::string& key, const std::function<std::string()>& compute) const;

  std::unique_ptr<const cohort::Cohort> cohort_;
  std::map<std::string, Disease> diseases_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::string> cache_;
};

// Blocks serving `session` until the process is stopped, or until `*stop`
// becomes true when a flag is given.
void Serve(const ApiSession& session, const std::string& host, int port,
           const std::atomic<bool>* stop = nullptr);

}  // namespace hdpd::interface

#endif  // HDPD_INTERFACE_SERVICE_H_
