// Copyright 2026 The SketchMotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "sketchmotion/errors.hpp"
#include "sketchmotion/guidance.hpp"
#include "sketchmotion/wire.hpp"

namespace sketchmotion {

namespace {

httplib::Client make_client(const std::string& endpoint, double timeout) {
  httplib::Client client(endpoint);
  if (!client.is_valid()) throw CriticConnectionError("invalid critic endpoint '" + endpoint + "'");
  const auto sec = static_cast<time_t>(timeout);
  const auto usec = static_cast<time_t>((timeout - std::floor(timeout)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  return client;
}

[[noreturn]] void raise_transport(httplib::Error err, const std::string& endpoint) {
  const std::string what = "critic at " + endpoint + ": " + httplib::to_string(err);
  if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
    throw CriticTimeout(what);
  }
  throw CriticConnectionError(what);
}

}  // namespace

RemoteCritic::RemoteCritic(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_(timeout_seconds) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw CriticConnectionError("empty critic endpoint");
  if (!(timeout_ > 0.0)) throw InvalidArgument("critic timeout must be positive");
}

void RemoteCritic::check_health() {
  auto client = make_client(endpoint_, timeout_);
  auto res = client.Get(wire::kHealthPath);
  if (!res) raise_transport(res.error(), endpoint_);
  if (res->status != 200) throw CriticProtocolError("health probe returned HTTP " + std::to_string(res->status));
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || j.value("status", std::string()) != "ok") {
    throw CriticProtocolError("health probe did not report status ok");
  }
  model_ = j.value("model", std::string());
}

CriticResponse RemoteCritic::predict(const CriticRequest& request, const StepContext&) {
  const std::string body = wire::encode_request(request);
  if (body.size() > wire::kMaxPayloadBytes) throw CriticError("request exceeds the 64 MB payload budget");
  auto client = make_client(endpoint_, timeout_);
  auto res = client.Post(wire::kPredictPath, body, "application/json");
  if (!res) raise_transport(res.error(), endpoint_);
  if (res->status != 200) {
    throw CriticProtocolError("critic returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  CriticResponse resp = wire::decode_response(res->body);
  if (!resp.noise_pred.same_shape(request.noisy)) {
    throw CriticShapeMismatch("critic response shape does not match the request");
  }
  return resp;
}

}  // namespace sketchmotion
