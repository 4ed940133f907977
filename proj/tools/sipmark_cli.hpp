#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// commands in-process with its own streams.

#include <algorithm>
#include <array>
#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sipmark/pdf.hpp"
#include "sipmark/sip.hpp"
#include "sipmark/watermark.hpp"

namespace sipmark::cli {

using watermark::json;
using watermark::Scheme;
using watermark::Status;

enum ExitCode : int {
  kOk = 0,
  kParse = 1,
  kCapacity = 2,
  kVerifyMismatch = 3,
  kNotWatermarked = 4,
  kUnsupported = 5,
  kUsage = 64,
  kSelftestFailed = 70,
};

inline int exit_code_for(Status s) {
  switch (s) {
    case Status::ok: return kOk;
    case Status::parse_error: return kParse;
    case Status::capacity_error:
    case Status::embedding_error: return kCapacity;
    case Status::verify_mismatch: return kVerifyMismatch;
    case Status::not_watermarked:
    case Status::extraction_failed: return kNotWatermarked;
    case Status::unsupported: return kUnsupported;
    case Status::usage_error: return kUsage;
  }
  return kParse;
}

struct Options {
  std::string scheme = "grid";
  std::string watermark;
  bool verify = false;
  int delta = 60;
  std::size_t page = 1;
  double marker_size = 0.5;
  std::string marker_color = "FFFFFF";
  std::string paragraph;
  std::size_t max_depth = 4096;
  bool dry_run = false;
  bool json_output = false;
  std::size_t jobs = 1;
  std::vector<std::string> inputs;
  std::string output;
};

inline std::uint64_t parse_watermark(const std::string& text) {
  const bool hex = text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
  const std::string digits = hex ? text.substr(2) : text;
  if (digits.empty() || digits.find_first_not_of(hex ? "0123456789abcdefABCDEF" : "0123456789") !=
                            std::string::npos) {
    throw Error(ErrorCode::invalid_watermark, "watermark must be a decimal or 0x-hex integer");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(digits.c_str(), nullptr, hex ? 16 : 10);
  if (errno == ERANGE) throw Error(ErrorCode::invalid_watermark, "watermark exceeds 64 bits");
  if (v == 0) throw Error(ErrorCode::invalid_watermark, "watermark must be >= 1");
  return v;
}

inline std::array<double, 3> parse_color(std::string text) {
  if (!text.empty() && text[0] == '#') text.erase(0, 1);
  if (text.size() != 6 || text.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw Error(ErrorCode::config_error, "marker color must be six hex digits");
  }
  std::array<double, 3> rgb{};
  for (std::size_t k = 0; k < 3; ++k) {
    rgb[k] = static_cast<double>(std::stoi(text.substr(2 * k, 2), nullptr, 16)) / 255.0;
  }
  return rgb;
}

inline watermark::ParagraphSelector parse_paragraph(const std::string& text) {
  const auto colon = text.find(':');
  std::size_t page = 0, stream = 0;
  try {
    std::size_t used = 0;
    page = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const auto rest = text.substr(colon + 1);
    stream = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::config_error, "--paragraph expects PAGE:STREAM, e.g. 1:1");
  }
  if (colon == std::string::npos || page == 0 || stream == 0) {
    throw Error(ErrorCode::config_error, "--paragraph expects PAGE:STREAM, both from 1");
  }
  return {page - 1, stream - 1};
}

/// Defaults from the JSON file named by SIPMARK_CONFIG; flags given on the
/// command line win.
inline void apply_config(Options& opts, const json& cfg, const std::set<std::string>& given) {
  if (!cfg.is_object()) throw Error(ErrorCode::config_error, "config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (given.contains(key)) continue;
    try {
      if (key == "scheme") opts.scheme = value.get<std::string>();
      else if (key == "delta") opts.delta = value.get<int>();
      else if (key == "page") opts.page = value.get<std::size_t>();
      else if (key == "marker_size") opts.marker_size = value.get<double>();
      else if (key == "marker_color") opts.marker_color = value.get<std::string>();
      else if (key == "max_depth") opts.max_depth = value.get<std::size_t>();
      else if (key == "jobs") opts.jobs = value.get<std::size_t>();
      else if (key == "verify") opts.verify = value.get<bool>();
      else throw Error(ErrorCode::config_error, "unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw Error(ErrorCode::config_error, "config key '" + key + "': " + e.what());
    }
  }
  if (!watermark::parse_scheme(opts.scheme)) {
    throw Error(ErrorCode::config_error, "unknown scheme '" + opts.scheme + "'");
  }
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::serialization_error, "cannot write " + path);
}

inline watermark::SpacingConfig spacing_config(const Options& o) {
  watermark::SpacingConfig c;
  c.delta = o.delta;
  if (!o.paragraph.empty()) c.paragraph = parse_paragraph(o.paragraph);
  return c;
}

inline watermark::GridConfig grid_config(const Options& o) {
  watermark::GridConfig c;
  if (o.page == 0) throw Error(ErrorCode::config_error, "--page counts from 1");
  c.page_index = o.page - 1;
  c.marker_size = o.marker_size;
  c.marker_color = parse_color(o.marker_color);
  return c;
}

inline watermark::StructureConfig structure_config(const Options& o) {
  watermark::StructureConfig c;
  c.max_depth = o.max_depth;
  return c;
}

inline watermark::Extraction extract_with(const Options& o, Scheme scheme,
                                          const pdf::PdfDocument& doc) {
  switch (scheme) {
    case Scheme::spacing: return watermark::extract_spacing(doc, spacing_config(o));
    case Scheme::grid: return watermark::extract_grid(doc, grid_config(o));
    case Scheme::structure: return watermark::extract_structure_sip(doc, structure_config(o));
  }
  throw Error(ErrorCode::config_error, "unknown scheme");
}

struct Outcome {
  int code = kOk;
  json report;
};

inline Outcome error_outcome(const std::string& command, const std::string& file, Scheme scheme,
                             const Error& e) {
  watermark::WatermarkReport r;
  r.scheme = scheme;
  r.fail(watermark::status_for(e.code()), e.what());
  auto j = to_json(r);
  j["command"] = command;
  j["file"] = file;
  return {exit_code_for(r.status), std::move(j)};
}

inline Outcome cmd_embed(const Options& o) {
  const Scheme scheme = *watermark::parse_scheme(o.scheme);
  const std::string& input = o.inputs.front();
  try {
    const std::uint64_t w = parse_watermark(o.watermark);
    const auto pi = encode_w_to_sip(w);
    auto doc = pdf::parse_pdf(read_file(input));
    watermark::Embedding result;
    switch (scheme) {
      case Scheme::spacing:
        result = watermark::embed_spacing(std::move(doc), pi, spacing_config(o));
        break;
      case Scheme::grid: result = watermark::embed_grid(std::move(doc), pi, grid_config(o)); break;
      case Scheme::structure:
        result = watermark::embed_structure(std::move(doc), pi, structure_config(o));
        break;
    }
    result.report.w = w;
    const std::string bytes = pdf::serialize_pdf(result.doc);
    std::optional<bool> verified;
    if (o.verify) {
      auto check = extract_with(o, scheme, pdf::parse_pdf(bytes));
      watermark::attach_watermark(check);
      verified = check.report.w == w;
      if (!*verified) {
        result.report.fail(Status::verify_mismatch,
                           "re-extraction gave " +
                               (check.report.w ? std::to_string(*check.report.w)
                                               : std::string(to_string(check.report.status))));
      }
    }
    if (!o.dry_run && result.report.status == Status::ok) write_file(o.output, bytes);
    auto j = to_json(result.report);
    j["command"] = "embed";
    j["file"] = input;
    j["output"] = o.dry_run ? json(nullptr) : json(o.output);
    j["verified"] = verified ? json(*verified) : json(nullptr);
    return {exit_code_for(result.report.status), std::move(j)};
  } catch (const Error& e) {
    return error_outcome("embed", input, scheme, e);
  }
}

inline Outcome extract_one(const Options& o, const std::string& input) {
  const Scheme scheme = *watermark::parse_scheme(o.scheme);
  try {
    const auto doc = pdf::parse_pdf(read_file(input));
    watermark::WatermarkReport report;
    if (o.dry_run && scheme == Scheme::structure) {
      // Raw recovered edges only, no decoding.
      report = watermark::extract_structure(doc, structure_config(o)).report;
    } else {
      auto ex = extract_with(o, scheme, doc);
      watermark::attach_watermark(ex);
      report = std::move(ex.report);
    }
    auto j = to_json(report);
    j["command"] = "extract";
    j["file"] = input;
    return {exit_code_for(report.status), std::move(j)};
  } catch (const Error& e) {
    return error_outcome("extract", input, scheme, e);
  }
}

inline std::size_t largest_odd_at_most(std::size_t n) {
  if (n == 0) return 0;
  return n % 2 == 1 ? n : n - 1;
}

inline json capacity_entry(std::size_t n_star) {
  n_star = std::min<std::size_t>(largest_odd_at_most(n_star), 129);
  const std::size_t bits = n_star >= 3 ? (n_star - 1) / 2 : 0;
  return {{"max_n_star", n_star}, {"max_watermark_bits", bits}};
}

inline Outcome inspect_one(const Options& o, const std::string& input) {
  json j;
  j["schema_version"] = watermark::kReportSchemaVersion;
  j["command"] = "inspect";
  j["file"] = input;
  try {
    const auto doc = pdf::parse_pdf(read_file(input));
    json kinds = json::object();
    for (auto k : {pdf::ObjectKind::boolean, pdf::ObjectKind::numeric, pdf::ObjectKind::string,
                   pdf::ObjectKind::name, pdf::ObjectKind::array, pdf::ObjectKind::null,
                   pdf::ObjectKind::dictionary, pdf::ObjectKind::stream}) {
      kinds[std::string(pdf::to_string(k))] = 0;
    }
    for (const auto& [ref, body] : doc.objects) {
      if (body.kind() != pdf::ObjectKind::reference) {
        kinds[std::string(pdf::to_string(body.kind()))] =
            kinds[std::string(pdf::to_string(body.kind()))].get<std::size_t>() + 1;
      }
    }
    const auto tree = pdf::get_page_tree(doc);
    j["status"] = "ok";
    j["version"] = doc.header_version;
    j["objects"] = doc.objects.size();
    j["object_kinds"] = kinds;
    j["pages"] = tree.pages.size();
    j["page_tree_depth"] = tree.depth();
    j["declared_count"] = tree.declared_count;
    j["extra_kids"] = tree.extra_kids.size();

    json cap = json::object();
    auto guarded = [&](const char* name, auto&& fn) {
      try {
        cap[name] = fn();
      } catch (const Error& e) {
        cap[name] = {{"error", e.what()}};
      }
    };
    guarded("spacing", [&] {
      const auto gaps = watermark::spacing_capacity_gaps(doc);
      std::size_t n = 0;
      while ((n + 1) * (n + 1) <= gaps) ++n;
      auto e = capacity_entry(n);
      e["gaps"] = gaps;
      return e;
    });
    guarded("grid", [&] { return capacity_entry(watermark::grid_capacity(doc, grid_config(o))); });
    guarded("structure", [&] {
      const auto n = watermark::structure_capacity(doc, structure_config(o));
      auto e = capacity_entry(n);
      e["path_order"] = n;
      return e;
    });
    j["capacity"] = cap;
    return {kOk, std::move(j)};
  } catch (const Error& e) {
    const auto status = watermark::status_for(e.code());
    j["status"] = to_string(status);
    j["diagnostics"] = json::array({e.what()});
    return {exit_code_for(status), std::move(j)};
  }
}

inline std::string inspect_text(const json& j) {
  std::ostringstream os;
  os << j["file"].get<std::string>() << ": ";
  if (j["status"] != "ok") {
    os << j["status"].get<std::string>() << " (" << j["diagnostics"][0].get<std::string>()
       << ")\n";
    return os.str();
  }
  os << "PDF " << j["version"].get<std::string>() << ", " << j["objects"] << " objects, "
     << j["pages"] << " page(s), page tree depth " << j["page_tree_depth"] << '\n';
  os << "  kinds:";
  for (const auto& [k, v] : j["object_kinds"].items()) os << ' ' << k << '=' << v;
  os << '\n';
  for (const auto& [scheme, c] : j["capacity"].items()) {
    os << "  " << scheme << ": ";
    if (c.contains("error")) {
      os << c["error"].get<std::string>() << '\n';
    } else {
      os << "n* up to " << c["max_n_star"] << ", watermarks up to " << c["max_watermark_bits"]
         << " bits\n";
    }
  }
  return os.str();
}

/// Runs `fn` over every input with `jobs` workers; results keep input order.
template <typename Fn>
std::vector<Outcome> run_batch(const std::vector<std::string>& inputs, std::size_t jobs, Fn fn) {
  std::vector<Outcome> results(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < inputs.size(); k = next++) results[k] = fn(inputs[k]);
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, inputs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

inline int first_failure(const std::vector<Outcome>& results) {
  for (const auto& r : results) {
    if (r.code != kOk) return r.code;
  }
  return kOk;
}

inline int cmd_selftest(const Options& o, std::ostream& out, const CodecFunctions& fns = {}) {
  const auto report = run_selftest(fns);
  if (o.json_output) {
    json lengths = json::array();
    for (const auto& l : report.lengths) {
      lengths.push_back({{"n", l.n},
                         {"involutions", l.involutions},
                         {"expected", l.expected},
                         {"failures", l.failures}});
    }
    out << json{{"schema_version", watermark::kReportSchemaVersion},
                {"command", "selftest"},
                {"status", report.passed() ? "ok" : "failed"},
                {"checks", report.checks},
                {"failures", report.failures},
                {"lengths", lengths},
                {"notes", report.notes}}
               .dump()
        << '\n';
  } else {
    for (const auto& l : report.lengths) {
      out << "n=" << l.n << " involutions=" << l.involutions << " expected=" << l.expected
          << " failures=" << l.failures << '\n';
    }
    for (const auto& note : report.notes) out << "FAIL " << note << '\n';
    out << (report.passed() ? "selftest passed: " : "selftest FAILED: ") << report.checks
        << " checks, " << report.failures << " failures\n";
  }
  return report.passed() ? kOk : kSelftestFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const char* config_path = std::getenv("SIPMARK_CONFIG")) {
  CLI::App app{"Embed and extract integer watermarks in PDF files"};
  app.name("sipmark");
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> schemes{"spacing", "grid", "structure"};
  auto add_scheme_options = [&](CLI::App* sub) {
    sub->add_option("--scheme", o.scheme, "spacing, grid or structure (default grid)")
        ->check(CLI::IsMember(schemes));
    sub->add_option("--delta", o.delta, "spacing: gap increment in 1/1000 text units");
    sub->add_option("--paragraph", o.paragraph, "spacing: use PAGE:STREAM instead of searching");
    sub->add_option("--page", o.page, "grid: page number, from 1");
    sub->add_option("--marker-size", o.marker_size, "grid: marker side in points");
    sub->add_option("--marker-color", o.marker_color, "grid: marker RGB as hex, e.g. FFFFFF");
    sub->add_option("--max-depth", o.max_depth, "structure: traversal depth bound");
    sub->add_flag("--dry-run", o.dry_run, "do not write output / report raw structure edges");
    sub->add_flag("--json", o.json_output, "JSON output (embed and extract always use it)");
  };

  auto* embed = app.add_subcommand("embed", "write a watermarked copy of a PDF");
  add_scheme_options(embed);
  embed->add_option("-w,--watermark", o.watermark, "positive integer, decimal or 0x-hex")
      ->required();
  embed->add_flag("--verify", o.verify, "re-extract from the written bytes and compare");
  std::string embed_input;
  embed->add_option("input", embed_input, "input PDF")->required();
  embed->add_option("output", o.output, "output PDF")->required();

  auto* extract = app.add_subcommand("extract", "recover the watermark from PDFs");
  add_scheme_options(extract);
  extract->add_option("inputs", o.inputs, "input PDFs")->required();
  extract->add_option("-j,--jobs", o.jobs, "files processed in parallel");

  auto* inspect = app.add_subcommand("inspect", "summarize PDFs and their capacity");
  inspect->add_option("inputs", o.inputs, "input PDFs")->required();
  inspect->add_option("-j,--jobs", o.jobs, "files processed in parallel");
  inspect->add_option("--page", o.page, "page used for the grid capacity");
  inspect->add_option("--max-depth", o.max_depth, "structure traversal depth bound");
  inspect->add_flag("--json", o.json_output, "one JSON object per file");

  auto* selftest = app.add_subcommand("selftest", "exhaustive codec checks");
  selftest->add_flag("--json", o.json_output, "JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (config_path && *config_path) {
      std::set<std::string> given;
      auto* sub = app.get_subcommands().front();
      for (const auto* opt : sub->get_options()) {
        if (opt->count() == 0) continue;
        auto name = opt->get_name(false, true);
        while (!name.empty() && name.front() == '-') name.erase(0, 1);
        std::replace(name.begin(), name.end(), '-', '_');
        given.insert(name);
      }
      apply_config(o, load_config_file(config_path), given);
    }
    if (o.jobs == 0) throw Error(ErrorCode::config_error, "--jobs must be at least 1");

    if (embed->parsed()) {
      o.inputs = {embed_input};
      if (o.delta < 20) throw Error(ErrorCode::config_error, "--delta must be at least 20");
      parse_watermark(o.watermark);
      const auto r = cmd_embed(o);
      out << r.report.dump() << '\n';
      return r.code;
    }
    if (extract->parsed()) {
      const auto results =
          run_batch(o.inputs, o.jobs, [&](const std::string& f) { return extract_one(o, f); });
      for (const auto& r : results) out << r.report.dump() << '\n';
      return first_failure(results);
    }
    if (inspect->parsed()) {
      const auto results =
          run_batch(o.inputs, o.jobs, [&](const std::string& f) { return inspect_one(o, f); });
      for (const auto& r : results) out << (o.json_output ? r.report.dump() + "\n" : inspect_text(r.report));
      return first_failure(results);
    }
    return cmd_selftest(o, out);
  } catch (const Error& e) {
    err << "sipmark: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace sipmark::cli
