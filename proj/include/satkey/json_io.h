//
// Copyright 2026 The Satkey Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SATKEY_JSON_IO_H_
#define SATKEY_JSON_IO_H_

#include <string>

#include <nlohmann/json.hpp>

#include "satkey/campaign.h"
#include "satkey/counts.h"
#include "satkey/finite_key.h"
#include "satkey/optimizer.h"

namespace satkey {

void to_json(nlohmann::json& j, const ProtocolParams& p);
void from_json(const nlohmann::json& j, ProtocolParams& p);

// Per-intensity counts keyed by basis, plus the protocol settings.
void to_json(nlohmann::json& j, const BlockTallies& t);
void from_json(const nlohmann::json& j, BlockTallies& t);

void to_json(nlohmann::json& j, const CorrectedTallies& c);
void to_json(nlohmann::json& j, const SklResult& r);
void to_json(nlohmann::json& j, const OptResult& r);
void to_json(nlohmann::json& j, const FootprintCurve& c);
void to_json(nlohmann::json& j, const AnnualEstimate& a);

BlockTallies read_tallies_json(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace satkey

#endif  // SATKEY_JSON_IO_H_
