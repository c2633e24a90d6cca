#include "hgp/hgp.h"

#include <new>
#include <string>

#include "session.hpp"

struct hgp_session {
  hgp::RunConfig config;
  std::unique_ptr<hgp::Session> session;
  std::string last_error;
};

namespace {

hgp_status status_of(const hgp::Error& e) {
  switch (e.code()) {
    case hgp::ErrorCode::Config:
      return HGP_CONFIG_ERROR;
    case hgp::ErrorCode::Scope:
      return HGP_SCOPE_ERROR;
    case hgp::ErrorCode::Resource:
      return HGP_RESOURCE_ERROR;
    case hgp::ErrorCode::Precondition:
      return HGP_PRECONDITION_ERROR;
    case hgp::ErrorCode::Structure:
      return HGP_STRUCTURE_ERROR;
    case hgp::ErrorCode::Internal:
      return HGP_INTERNAL_ERROR;
  }
  return HGP_INTERNAL_ERROR;
}

}  // namespace

extern "C" {

hgp_status hgp_session_create(const char* config_text, hgp_session** out) {
  if (!config_text || !out) return HGP_INVALID_ARGUMENT;
  *out = nullptr;
  hgp_session* s = new (std::nothrow) hgp_session;
  if (!s) return HGP_INTERNAL_ERROR;
  try {
    s->config = hgp::RunConfig::parse(config_text);
    s->session = std::make_unique<hgp::Session>(s->config);
  } catch (const hgp::Error& e) {
    hgp_status st = status_of(e);
    delete s;
    return st;
  } catch (const std::exception&) {
    delete s;
    return HGP_INTERNAL_ERROR;
  }
  *out = s;
  return HGP_OK;
}

void hgp_session_destroy(hgp_session* s) { delete s; }

hgp_status hgp_run(hgp_session* s, const char* command) {
  if (!s || !command) return HGP_INVALID_ARGUMENT;
  s->last_error.clear();
  try {
    s->session->run(command);
    return HGP_OK;
  } catch (const hgp::Error& e) {
    s->last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return HGP_INTERNAL_ERROR;
  }
}

const char* hgp_report_json(const hgp_session* s) {
  if (!s || !s->session->has_run()) return nullptr;
  return s->session->report_json().c_str();
}

int hgp_artifact_count(const hgp_session* s) {
  if (!s) return 0;
  return static_cast<int>(s->session->artifacts().size());
}

const char* hgp_artifact_name(const hgp_session* s, int index) {
  if (!s || index < 0 || index >= hgp_artifact_count(s)) return nullptr;
  return s->session->artifacts()[static_cast<std::size_t>(index)].first.c_str();
}

const char* hgp_artifact_data(const hgp_session* s, int index) {
  if (!s || index < 0 || index >= hgp_artifact_count(s)) return nullptr;
  return s->session->artifacts()[static_cast<std::size_t>(index)].second.c_str();
}

int hgp_summary_pass(const hgp_session* s) {
  if (!s || !s->session->has_run()) return -1;
  return s->session->summary_pass() ? 1 : 0;
}

const char* hgp_last_error(const hgp_session* s) { return s ? s->last_error.c_str() : ""; }

const char* hgp_version(void) { return "1.0.0"; }

}  // extern "C"
