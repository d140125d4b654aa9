/*****************************************************************************
*  Copyright 2026 the stackprobe authors
*
*  Licensed under the Apache License, Version 2.0 (the "License");
*  you may not use this file except in compliance with the License.
*  You may obtain a copy of the License at
*
* http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* *****************************************************************************/

// Machine-readable line records shared by the CLI writers and the report
// aggregator. Every record is one JSON object with a "record" tag; key
// order is fixed so identical runs emit identical bytes.

#ifndef STACKPROBE_RECORDS_HPP
#define STACKPROBE_RECORDS_HPP

#include <string>

#include "json.hpp"

#include "stackprobe/cmd_runner.hpp"
#include "stackprobe/credscan.hpp"
#include "stackprobe/http_fuzzer.hpp"
#include "stackprobe/report.hpp"
#include "stackprobe/sidejack.hpp"

namespace stackprobe::records {

using Json = nlohmann::ordered_json;

Json exchange_record(const httpfuzz::HttpExchange& exchange);
Json counter_record(const httpfuzz::PacketCounter& counter);
Json execution_record(const runner::ExecutionRecord& record);
Json residue_record(const std::string& name);
Json hijack_record(const sidejack::HijackAttempt& attempt);

/// `finding` must be unredacted: the record carries an "admin" flag derived
/// from the cleartext key/value so severity survives masking. Pass
/// redact_value=true to mask the value field in the emitted record.
Json credential_record(const credscan::CredentialFinding& finding,
                       bool redact_value = false);
Json port_record(const report::PortScanEntry& entry);
Json finding_record(const report::Finding& finding);

}  // namespace stackprobe::records

#endif  // STACKPROBE_RECORDS_HPP
