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

// Python bindings for the deterministic core operations: fuzz config
// parsing, sweep planning and generation, response classification, cookie
// harvesting, credential scanning and report aggregation. Live network
// campaigns stay in the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stackprobe/credscan.hpp"
#include "stackprobe/errors.hpp"
#include "stackprobe/fuzz_config.hpp"
#include "stackprobe/http_fuzzer.hpp"
#include "stackprobe/payload.hpp"
#include "stackprobe/records.hpp"
#include "stackprobe/report.hpp"
#include "stackprobe/sidejack.hpp"
#include "stackprobe/victim.hpp"

namespace py = pybind11;

namespace {

using namespace stackprobe;

py::object json_to_py(const records::Json& value) {
  using records::Json;
  switch (value.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(value.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(value.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(value.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(value.get<double>());
    case Json::value_t::string: return py::str(value.get<std::string>());
    case Json::value_t::array: {
      py::list list;
      for (const auto& item : value) list.append(json_to_py(item));
      return list;
    }
    case Json::value_t::object: {
      py::dict dict;
      for (const auto& [key, item] : value.items()) {
        dict[py::str(key)] = json_to_py(item);
      }
      return dict;
    }
    default: return py::none();
  }
}

py::dict session_to_py(const sidejack::CapturedSession& s) {
  py::dict d;
  d["url"] = s.url;
  d["cookie_name"] = s.cookie_name;
  d["cookie_value"] = s.cookie_value;
  d["observed_at"] = s.observed_at;
  d["source_client"] = s.source_client;
  return d;
}

std::vector<std::string> classify_labels(const httpfuzz::HttpExchange& ex) {
  std::vector<std::string> names;
  for (auto label : httpfuzz::classify(ex)) {
    names.push_back(httpfuzz::label_name(label));
  }
  return names;
}

credscan::ScanRuleSet rules_or_default(const std::string& rules_path) {
  return rules_path.empty() ? credscan::ScanRuleSet::defaults()
                            : credscan::load_rules(rules_path);
}

}  // namespace

PYBIND11_MODULE(stackprobe, m) {
  m.doc() = "penetration-test toolkit core: block-based command fuzzing, "
            "HTTP fuzz classification, session harvesting, credential "
            "scanning and report aggregation";

  py::register_exception<Error>(m, "StackprobeError");

  py::class_<fuzz::TestCase>(m, "TestCase")
      .def_readonly("index", &fuzz::TestCase::index)
      .def_readonly("comment_lines", &fuzz::TestCase::comment_lines)
      .def_readonly("placeholder_count", &fuzz::TestCase::placeholder_count)
      .def("command_text", &fuzz::TestCase::command_text)
      .def("render", &fuzz::TestCase::render, py::arg("fill"));

  py::class_<fuzz::FuzzConfig>(m, "FuzzConfig")
      .def_readonly("name", &fuzz::FuzzConfig::name)
      .def_readonly("charset", &fuzz::FuzzConfig::charset)
      .def_readonly("max_len", &fuzz::FuzzConfig::max_len)
      .def_readonly("cases", &fuzz::FuzzConfig::cases)
      .def("__len__",
           [](const fuzz::FuzzConfig& c) { return c.cases.size(); });

  py::class_<fuzz::FuzzPlan>(m, "FuzzPlan")
      .def_readonly("per_case_count", &fuzz::FuzzPlan::per_case_count)
      .def_readonly("total_count", &fuzz::FuzzPlan::total_count);

  py::class_<fuzz::GeneratedCommand>(m, "GeneratedCommand")
      .def_readonly("case_index", &fuzz::GeneratedCommand::case_index)
      .def_property_readonly(
          "char",
          [](const fuzz::GeneratedCommand& c) { return std::string(1, c.fill); })
      .def_readonly("length", &fuzz::GeneratedCommand::length)
      .def_readonly("rendered", &fuzz::GeneratedCommand::rendered);

  m.def("default_charset",
        [] { return std::string(fuzz::kDefaultCharset); },
        "the fourteen characters the published campaigns substitute");
  m.attr("DEFAULT_MAX_LEN") = fuzz::kDefaultMaxLen;

  m.def(
      "parse_config",
      [](const std::string& text, const std::string& name,
         const std::string& charset, int max_len) {
        fuzz::ConfigDefaults defaults;
        if (!charset.empty()) defaults.charset = charset;
        if (max_len > 0) defaults.max_len = max_len;
        return fuzz::parse_config_text(text, name, defaults);
      },
      py::arg("text"), py::arg("name") = "config",
      py::arg("charset") = "", py::arg("max_len") = 0,
      "parse a block-based fuzz config script");
  m.def("parse_config_file",
        [](const std::string& path) { return fuzz::parse_config_file(path); },
        py::arg("path"));
  m.def("serialize_config", &fuzz::serialize_config, py::arg("config"));

  m.def("plan", &fuzz::plan, py::arg("config"),
        "sweep arithmetic: per-case and total command counts");
  m.def(
      "generate",
      [](const fuzz::FuzzConfig& config, std::uint64_t limit, int min_len,
         int max_len) {
        fuzz::CommandStream stream(config, min_len, max_len);
        std::vector<fuzz::GeneratedCommand> out;
        while (auto cmd = stream.next()) {
          out.push_back(std::move(*cmd));
          if (limit > 0 && out.size() >= limit) break;
        }
        return out;
      },
      py::arg("config"), py::arg("limit") = 0, py::arg("min_len") = 1,
      py::arg("max_len") = 0,
      "materialize the sweep (careful: pass limit for large configs)");
  m.def("emit_script", &fuzz::emit_script_file, py::arg("config"),
        py::arg("path"),
        "write the sweep as a script file; returns the command line count");

  m.def("bed_functions",
        [] { return httpfuzz::bed_default_functions(); },
        "the thirteen HTTP elements the bed mode fuzzes");
  m.def("bed_payloads", &httpfuzz::bed_payloads, py::arg("charset") = "A");
  m.def("sfuzz_lengths", &httpfuzz::sfuzz_basic_lengths,
        py::arg("max_payload_len"));
  m.def(
      "classify_status",
      [](int status) {
        httpfuzz::HttpExchange ex;
        ex.outcome = httpfuzz::HttpExchange::Outcome::status;
        ex.status = status;
        return classify_labels(ex);
      },
      py::arg("status"), "labels for a numeric response status");
  m.def(
      "classify_outcome",
      [](const std::string& outcome) {
        httpfuzz::HttpExchange ex;
        if (outcome == "timeout") {
          ex.outcome = httpfuzz::HttpExchange::Outcome::timeout;
        } else if (outcome == "connection_reset") {
          ex.outcome = httpfuzz::HttpExchange::Outcome::connection_reset;
        } else if (outcome == "malformed_response") {
          ex.outcome = httpfuzz::HttpExchange::Outcome::malformed_response;
        } else {
          throw Error("unknown outcome '" + outcome + "'");
        }
        return classify_labels(ex);
      },
      py::arg("outcome"), "labels for a non-status outcome");

  m.def("harvest_capture",
        [](const std::string& path, const std::string& cookie_name) {
          py::list out;
          for (const auto& s : sidejack::harvest_capture(path, cookie_name)) {
            out.append(session_to_py(s));
          }
          return out;
        },
        py::arg("path"), py::arg("cookie_name") = "sessionid");
  m.def("load_session_store",
        [](const std::string& path) {
          py::list out;
          for (const auto& s : sidejack::load_session_store(path)) {
            out.append(session_to_py(s));
          }
          return out;
        },
        py::arg("path"));

  m.def("redact_value", &credscan::redact_value, py::arg("value"));
  m.def(
      "scan_tree",
      [](const std::string& root, const std::string& rules_path,
         bool redact) {
        auto report = credscan::scan_tree(root, rules_or_default(rules_path));
        py::list out;
        for (const auto& f : report.findings) {
          out.append(json_to_py(records::credential_record(f, redact)));
        }
        return out;
      },
      py::arg("root"), py::arg("rules_path") = "", py::arg("redact") = true);
  m.def(
      "scan_capture",
      [](const std::string& path, const std::string& rules_path,
         bool redact) {
        auto report =
            credscan::scan_capture(path, rules_or_default(rules_path));
        py::list out;
        for (const auto& f : report.findings) {
          out.append(json_to_py(records::credential_record(f, redact)));
        }
        return out;
      },
      py::arg("path"), py::arg("rules_path") = "", py::arg("redact") = true);

  m.def("seed_fixture", &victim::seed_credential_fixture, py::arg("root"),
        "write the credential filesystem fixture; returns relative paths");

  m.def("port_labels", [] {
    py::dict labels;
    for (const auto& entry : report::default_port_table()) {
      labels[py::int_(entry.port)] = entry.service;
    }
    return labels;
  });

  m.def(
      "aggregate",
      [](const std::vector<std::string>& inputs) {
        py::list out;
        for (const auto& f : report::aggregate(inputs)) {
          out.append(json_to_py(records::finding_record(f)));
        }
        return out;
      },
      py::arg("inputs"), "merge pipeline output files into findings");
  m.def(
      "render_report",
      [](const std::vector<std::string>& inputs, const std::string& format) {
        auto findings = report::aggregate(inputs);
        return format == "jsonl" ? report::render_jsonl(findings)
                                 : report::render_text(findings);
      },
      py::arg("inputs"), py::arg("format") = "text");
}
