#include "iebench/interchange.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iebench/error.hpp"
#include "iebench/text.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace iebench {

void ExtractionRecord::add_unit(std::vector<std::string> unit_tokens) {
  if (unit_tokens.empty()) return;
  unit_sizes.push_back(unit_tokens.size());
  for (auto& t : unit_tokens) tokens.push_back(std::move(t));
}

std::vector<std::vector<std::string>> ExtractionRecord::units() const {
  std::vector<std::vector<std::string>> out;
  std::size_t offset = 0;
  for (std::size_t size : unit_sizes) {
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(offset),
                     tokens.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  if (offset < tokens.size()) out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(offset), tokens.end());
  return out;
}

const char* to_string(AdapterFormat format) {
  switch (format) {
    case AdapterFormat::xml: return "xml";
    case AdapterFormat::json: return "json";
    case AdapterFormat::csv: return "csv";
    case AdapterFormat::text: return "text";
    case AdapterFormat::records: return "records";
  }
  return "unknown";
}

const char* to_string(OutputScope scope) { return scope == OutputScope::page ? "page" : "document"; }

const Selector& AdapterConfig::selector_for(const ContentLabel& label) const {
  auto it = selectors.find(label);
  if (it == selectors.end()) throw ConfigError("adapter for '" + tool + "' has no selector for label " + label.name());
  return it->second;
}

std::string AdapterConfig::canonical_json() const {
  json doc;
  doc["format_version"] = format_version;
  doc["tool"] = tool;
  doc["format"] = to_string(format);
  doc["scope"] = to_string(scope);
  doc["path_template"] = path_template;
  json sel = json::object();
  for (const auto& [label, selector] : selectors) {
    sel[label.name()] = json{{"path", selector.path}, {"text_field", selector.text_field}};
  }
  doc["selectors"] = std::move(sel);
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Selector grammars

namespace {

struct XmlStep {
  std::string name;
  bool descendant = false;
  std::string attribute;
  std::string attribute_value;
};

std::vector<XmlStep> parse_xml_path(std::string_view path) {
  std::vector<XmlStep> steps;
  std::size_t pos = 0;
  bool descendant = true;
  if (path.starts_with("//")) {
    pos = 2;
  } else if (path.starts_with("/")) {
    pos = 1;
    descendant = false;
  }
  while (pos < path.size()) {
    std::size_t end = pos;
    int depth = 0;
    while (end < path.size() && (path[end] != '/' || depth > 0)) {
      if (path[end] == '[') ++depth;
      if (path[end] == ']') --depth;
      ++end;
    }
    std::string_view token = path.substr(pos, end - pos);
    XmlStep step;
    step.descendant = descendant;
    const auto bracket = token.find('[');
    step.name = std::string(token.substr(0, bracket));
    if (bracket != std::string_view::npos) {
      // [@attr='value'] or [@attr="value"]
      const std::string predicate(token.substr(bracket));
      const auto eq = predicate.find('=');
      if (!predicate.starts_with("[@") || !predicate.ends_with("]") || eq == std::string_view::npos ||
          predicate.size() < eq + 4) {
        throw ConfigError("unsupported XML predicate in selector: " + std::string(path));
      }
      step.attribute = std::string(predicate.substr(2, eq - 2));
      std::string_view value = std::string_view(predicate).substr(eq + 1, predicate.size() - eq - 2);
      if (value.size() < 2 || value.front() != value.back() || (value.front() != '\'' && value.front() != '"')) {
        throw ConfigError("XML predicate value must be quoted: " + std::string(path));
      }
      step.attribute_value = std::string(value.substr(1, value.size() - 2));
    }
    if (step.name.empty()) throw ConfigError("empty step in XML selector: " + std::string(path));
    steps.push_back(std::move(step));
    if (end >= path.size()) break;
    if (path.substr(end).starts_with("//")) {
      descendant = true;
      pos = end + 2;
    } else {
      descendant = false;
      pos = end + 1;
    }
    if (pos >= path.size()) throw ConfigError("XML selector ends with '/': " + std::string(path));
  }
  if (steps.empty()) throw ConfigError("empty XML selector");
  return steps;
}

struct LineRange {
  std::size_t first = 1;
  std::size_t last = 0;  // 0 = through end of file
};

LineRange parse_line_rule(std::string_view rule) {
  if (rule == "all" || rule.empty()) return {};
  auto bad = [&] { return ConfigError("text selector must be 'all', 'lines:A-B' or 'lines:A-': " + std::string(rule)); };
  if (!rule.starts_with("lines:")) throw bad();
  std::string_view spec = rule.substr(6);
  const auto dash = spec.find('-');
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw bad();
    return v;
  };
  LineRange range;
  if (dash == std::string_view::npos) {
    range.first = range.last = number(spec);
  } else {
    range.first = number(spec.substr(0, dash));
    range.last = dash + 1 == spec.size() ? 0 : number(spec.substr(dash + 1));
  }
  if (range.first == 0 || (range.last != 0 && range.last < range.first)) throw bad();
  return range;
}

std::optional<AdapterFormat> format_from(std::string_view name) {
  for (auto f : {AdapterFormat::xml, AdapterFormat::json, AdapterFormat::csv, AdapterFormat::text, AdapterFormat::records}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

using Problems = std::vector<std::string>;

// Shared by parse (first problem thrown) and lint (all problems listed).
std::optional<AdapterConfig> check_config(const json& doc, const LabelVocabulary& vocabulary, Problems& problems) {
  if (!doc.is_object()) {
    problems.push_back("adapter config must be a JSON object");
    return std::nullopt;
  }
  AdapterConfig config;
  auto string_field = [&](const char* name, bool required) -> std::optional<std::string> {
    auto it = doc.find(name);
    if (it == doc.end()) {
      if (required) problems.push_back(fmt::format("missing field '{}'", name));
      return std::nullopt;
    }
    if (!it->is_string()) {
      problems.push_back(fmt::format("field '{}' must be a string", name));
      return std::nullopt;
    }
    return it->get<std::string>();
  };

  if (auto it = doc.find("format_version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != kAdapterFormatVersion) {
      problems.push_back(fmt::format("unsupported format_version (expected {})", kAdapterFormatVersion));
    }
  }
  if (auto tool = string_field("tool", true)) {
    if (tool->empty()) problems.push_back("tool name must not be empty");
    config.tool = *tool;
  }
  if (auto format = string_field("format", true)) {
    if (auto f = format_from(*format)) {
      config.format = *f;
    } else {
      problems.push_back("unknown format '" + *format + "' (expected xml, json, csv, text or records)");
    }
  }
  if (auto scope = string_field("scope", false)) {
    if (*scope == "page") {
      config.scope = OutputScope::page;
    } else if (*scope == "document") {
      config.scope = OutputScope::document;
    } else {
      problems.push_back("unknown scope '" + *scope + "' (expected page or document)");
    }
  }
  if (auto path = string_field("path_template", true)) {
    if (path->empty()) problems.push_back("path_template must not be empty");
    if (path->find("{doc}") == std::string::npos && config.format != AdapterFormat::records) {
      problems.push_back("path_template must contain {doc}");
    }
    if (config.scope == OutputScope::document && path->find("{page}") != std::string::npos) {
      problems.push_back("document-scope path_template must not contain {page}");
    }
    config.path_template = *path;
  }

  auto sel = doc.find("selectors");
  if (sel == doc.end() || !sel->is_object() || sel->empty()) {
    problems.push_back("'selectors' must be a non-empty object");
    return problems.empty() ? std::optional<AdapterConfig>(config) : std::nullopt;
  }
  std::map<std::string, std::string> seen_selectors;
  for (const auto& [name, value] : sel->items()) {
    std::optional<ContentLabel> label;
    try {
      label.emplace(name);
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
      continue;
    }
    if (!vocabulary.contains(*label)) {
      problems.push_back("selector label '" + name + "' is not in the label vocabulary");
      continue;
    }
    Selector selector;
    if (value.is_string()) {
      selector.path = value.get<std::string>();
    } else if (value.is_object() && value.contains("path") && value["path"].is_string()) {
      selector.path = value["path"].get<std::string>();
      if (auto tf = value.find("text_field"); tf != value.end()) {
        if (!tf->is_string()) {
          problems.push_back("text_field for '" + name + "' must be a string");
        } else {
          selector.text_field = tf->get<std::string>();
        }
      }
    } else {
      problems.push_back("selector for '" + name + "' must be a string or {\"path\", \"text_field\"}");
      continue;
    }
    if (config.format == AdapterFormat::csv && name != "table") {
      problems.push_back("csv adapters may only map the 'table' label, not '" + name + "'");
    }
    try {
      switch (config.format) {
        case AdapterFormat::xml: parse_xml_path(selector.path); break;
        case AdapterFormat::text: parse_line_rule(selector.path); break;
        case AdapterFormat::json:
          if (selector.path.empty()) problems.push_back("json selector for '" + name + "' has an empty path");
          break;
        case AdapterFormat::csv:
        case AdapterFormat::records: break;
      }
    } catch (const ConfigError& e) {
      problems.push_back("selector for '" + name + "': " + e.what());
    }
    const std::string identity = selector.path + "#" + selector.text_field;
    if (config.format != AdapterFormat::records && config.format != AdapterFormat::csv) {
      auto [it, inserted] = seen_selectors.emplace(identity, name);
      if (!inserted) problems.push_back("selector '" + selector.path + "' targets both '" + it->second + "' and '" + name + "'");
    }
    config.selectors.emplace(*label, std::move(selector));
  }
  if (!problems.empty()) return std::nullopt;
  return config;
}

}  // namespace

AdapterConfig parse_adapter_config(std::string_view json_text, const LabelVocabulary& vocabulary) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw JsonParseError(std::string("adapter config is not valid JSON: ") + e.what());
  }
  Problems problems;
  auto config = check_config(doc, vocabulary, problems);
  if (!config) throw ConfigError(problems.empty() ? "invalid adapter config" : problems.front());
  return *config;
}

AdapterConfig load_adapter_config(const fs::path& path, const LabelVocabulary& vocabulary) {
  return parse_adapter_config(read_file(path.string()), vocabulary);
}

std::vector<std::string> lint_adapter_config(std::string_view json_text, const LabelVocabulary& vocabulary) {
  Problems problems;
  std::vector<std::set<std::string>> keys;
  json doc;
  try {
    doc = json::parse(json_text, [&](int, json::parse_event_t event, json& parsed) {
      if (event == json::parse_event_t::object_start) {
        keys.emplace_back();
      } else if (event == json::parse_event_t::object_end) {
        keys.pop_back();
      } else if (event == json::parse_event_t::key) {
        const std::string key = parsed.get<std::string>();
        if (!keys.back().insert(key).second) problems.push_back("duplicate key '" + key + "'");
      }
      return true;
    });
  } catch (const json::parse_error& e) {
    problems.push_back(std::string("not valid JSON: ") + e.what());
    return problems;
  }
  check_config(doc, vocabulary, problems);
  return problems;
}

// ---------------------------------------------------------------------------
// Adapters

AdapterInput read_adapter_input(const fs::path& path, std::string document_id, std::optional<int> page) {
  SanitizedText text = sanitize_utf8(read_file(path.string()));
  return AdapterInput{std::move(text.text), path.string(), std::move(document_id), page, text.replacements};
}

namespace {

ExtractionRecord empty_record(const AdapterInput& input, const ContentLabel& label, std::string_view tool) {
  ExtractionRecord record;
  record.tool = std::string(tool);
  record.document_id = input.document_id;
  record.page = input.page;
  record.label = label;
  record.source_path = input.source_path;
  record.replaced_bytes = input.replacements;
  return record;
}

const std::string& xml_attr_key() {
  static const std::string key = "<xmlattr>";
  return key;
}

bool is_special(const std::string& key) { return !key.empty() && key.front() == '<'; }

bool step_matches(const XmlStep& step, const std::string& key, const pt::ptree& node) {
  if (step.name != "*") {
    if (step.name.find(':') != std::string::npos) {
      if (key != step.name) return false;
    } else {
      const auto colon = key.find(':');
      const std::string_view local = colon == std::string::npos ? std::string_view(key) : std::string_view(key).substr(colon + 1);
      if (local != step.name) return false;
    }
  }
  if (!step.attribute.empty()) {
    auto attrs = node.get_child_optional(xml_attr_key());
    if (!attrs) return false;
    auto value = attrs->get_optional<std::string>(pt::ptree::path_type(step.attribute, '\0'));
    if (!value || *value != step.attribute_value) return false;
  }
  return true;
}

void collect_text(const pt::ptree& node, std::vector<std::string>& tokens) {
  for (const auto& [key, child] : node) {
    if (key == "<xmltext>") {
      for (auto& t : tokenize(child.data())) tokens.push_back(std::move(t));
    } else if (!is_special(key)) {
      collect_text(child, tokens);
    }
  }
}

void select_xml(const pt::ptree& node, const std::vector<XmlStep>& steps, const std::vector<std::size_t>& states,
                ExtractionRecord& record, std::size_t& matches) {
  for (const auto& [key, child] : node) {
    if (is_special(key)) continue;
    std::vector<std::size_t> next;
    bool matched = false;
    for (std::size_t s : states) {
      if (step_matches(steps[s], key, child)) {
        if (s + 1 == steps.size()) {
          matched = true;
        } else {
          next.push_back(s + 1);
        }
      }
      if (steps[s].descendant) next.push_back(s);
    }
    if (matched) {
      ++matches;
      std::vector<std::string> tokens;
      collect_text(child, tokens);
      record.add_unit(std::move(tokens));
      continue;
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (!next.empty()) select_xml(child, steps, next, record, matches);
  }
}

void collect_json(const json& value, const std::vector<std::string>& segments, std::size_t index,
                  const std::string& text_field, std::vector<std::string>& out, const std::string& path) {
  if (value.is_null()) return;
  if (value.is_array()) {
    for (const auto& element : value) collect_json(element, segments, index, text_field, out, path);
    return;
  }
  if (index == segments.size()) {
    if (value.is_string()) {
      out.push_back(value.get<std::string>());
    } else if (value.is_object() && !text_field.empty()) {
      auto it = value.find(text_field);
      if (it == value.end() || it->is_null()) return;
      if (!it->is_string()) throw PathTypeError("field '" + text_field + "' under '" + path + "' is not a string");
      out.push_back(it->get<std::string>());
    } else {
      throw PathTypeError("JSON path '" + path + "' reaches a " + std::string(value.type_name()) +
                          "; expected a string, string list, or object list with a text field");
    }
    return;
  }
  if (!value.is_object()) {
    throw PathTypeError("JSON path '" + path + "' descends into a " + std::string(value.type_name()));
  }
  auto it = value.find(segments[index]);
  if (it == value.end()) return;
  collect_json(*it, segments, index + 1, text_field, out, path);
}

std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(separator, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ExtractionRecord extract_xml(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                             std::string_view tool) {
  const auto steps = parse_xml_path(selector.path);
  pt::ptree tree;
  try {
    std::istringstream stream(input.content);
    pt::read_xml(stream, tree, pt::xml_parser::no_concat_text);
  } catch (const pt::xml_parser_error& e) {
    throw XmlParseError(input.source_path + ": " + e.what());
  }
  if (std::none_of(tree.begin(), tree.end(), [](const auto& child) { return !is_special(child.first); })) {
    throw XmlParseError(input.source_path + ": no root element");
  }
  ExtractionRecord record = empty_record(input, label, tool);
  std::size_t matches = 0;
  select_xml(tree, steps, {0}, record, matches);
  record.selector_miss = matches == 0;
  return record;
}

ExtractionRecord extract_json(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                              std::string_view tool) {
  json doc;
  try {
    doc = json::parse(input.content);
  } catch (const json::parse_error& e) {
    throw JsonParseError(input.source_path + ": " + e.what());
  }
  std::vector<std::string> texts;
  collect_json(doc, split(selector.path, '.'), 0, selector.text_field, texts, selector.path);
  ExtractionRecord record = empty_record(input, label, tool);
  record.selector_miss = texts.empty();
  for (const auto& text : texts) record.add_unit(tokenize(text));
  return record;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    quoted = false;
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        break;
      case '"':
        if (field_started) throw CsvParseError(fmt::format("line {}: unexpected quote inside unquoted field", line));
        in_quotes = quoted = field_started = true;
        break;
      default:
        if (quoted) throw CsvParseError(fmt::format("line {}: data after closing quote", line));
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw CsvParseError(fmt::format("line {}: unterminated quoted field", line));
  if (field_started || !row.empty()) end_row();
  return rows;
}

ExtractionRecord extract_table_csv(const AdapterInput& input, std::string_view tool) {
  ExtractionRecord record = empty_record(input, ContentLabel("table"), tool);
  const auto rows = parse_csv(input.content);
  for (const auto& row : rows) {
    std::vector<std::string> tokens;
    for (const auto& cell : row) {
      for (auto& t : tokenize(cell)) tokens.push_back(std::move(t));
    }
    record.add_unit(std::move(tokens));
  }
  record.selector_miss = rows.empty();
  return record;
}

ExtractionRecord extract_plaintext(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                                   std::string_view tool) {
  const LineRange range = parse_line_rule(selector.path);
  ExtractionRecord record = empty_record(input, label, tool);
  auto lines = split(input.content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t selected = 0;
  for (std::size_t number = range.first; number <= lines.size(); ++number) {
    if (range.last != 0 && number > range.last) break;
    ++selected;
    record.add_unit(tokenize(lines[number - 1]));
  }
  record.selector_miss = selected == 0;
  return record;
}

ExtractionRecord extract_records(const AdapterInput& input, const ContentLabel& label, std::string_view tool) {
  ExtractionRecord record = empty_record(input, label, tool);
  std::size_t number = 0;
  std::size_t matches = 0;
  for (const auto& line : split(input.content, '\n')) {
    ++number;
    if (trim(line).empty()) continue;
    json entry;
    try {
      entry = json::parse(line);
      if (entry.value("label", "") != label.name() || entry.at("doc").get<std::string>() != input.document_id) continue;
      if (!tool.empty() && entry.contains("tool") && entry["tool"].get<std::string>() != tool) continue;
      const auto& page = entry.at("page");
      if (!page.is_null() && input.page && page.get<int>() != *input.page) continue;
      std::vector<std::string> tokens;
      for (const auto& t : entry.at("tokens")) {
        for (auto& piece : tokenize(t.get<std::string>())) tokens.push_back(std::move(piece));
      }
      ++matches;
      if (auto units = entry.find("units"); units != entry.end() && units->is_array()) {
        std::size_t offset = 0;
        for (const auto& size : *units) {
          const auto count = size.get<std::size_t>();
          if (offset + count > tokens.size()) throw JsonParseError("units exceed token count");
          record.add_unit({tokens.begin() + static_cast<std::ptrdiff_t>(offset),
                           tokens.begin() + static_cast<std::ptrdiff_t>(offset + count)});
          offset += count;
        }
        if (offset < tokens.size()) record.add_unit({tokens.begin() + static_cast<std::ptrdiff_t>(offset), tokens.end()});
      } else {
        record.add_unit(std::move(tokens));
      }
    } catch (const json::exception& e) {
      throw JsonParseError(fmt::format("{}:{}: {}", input.source_path, number, e.what()));
    }
  }
  record.selector_miss = matches == 0;
  return record;
}

ExtractionRecord run_adapter(const AdapterInput& input, const AdapterConfig& config, const ContentLabel& label) {
  switch (config.format) {
    case AdapterFormat::xml: return extract_xml(input, config.selector_for(label), label, config.tool);
    case AdapterFormat::json: return extract_json(input, config.selector_for(label), label, config.tool);
    case AdapterFormat::csv:
      config.selector_for(label);
      return extract_table_csv(input, config.tool);
    case AdapterFormat::text: return extract_plaintext(input, config.selector_for(label), label, config.tool);
    case AdapterFormat::records: return extract_records(input, label, config.tool);
  }
  throw ConfigError("unsupported adapter format");
}

namespace {

void require_format(const AdapterConfig& config, AdapterFormat format) {
  if (config.format != format) {
    throw ConfigError(fmt::format("adapter '{}' has format {}, expected {}", config.tool, to_string(config.format),
                                  to_string(format)));
  }
}

}  // namespace

ExtractionRecord parse_xml_extraction(const fs::path& file, const AdapterConfig& config, const ContentLabel& label,
                                      const std::string& document_id, std::optional<int> page) {
  require_format(config, AdapterFormat::xml);
  return extract_xml(read_adapter_input(file, document_id, page), config.selector_for(label), label, config.tool);
}

ExtractionRecord parse_json_extraction(const fs::path& file, const AdapterConfig& config, const ContentLabel& label,
                                       const std::string& document_id, std::optional<int> page) {
  require_format(config, AdapterFormat::json);
  return extract_json(read_adapter_input(file, document_id, page), config.selector_for(label), label, config.tool);
}

ExtractionRecord parse_table_csv(const fs::path& file, const std::string& tool, const std::string& document_id,
                                 std::optional<int> page) {
  return extract_table_csv(read_adapter_input(file, document_id, page), tool);
}

ExtractionRecord parse_plaintext(const fs::path& file, const AdapterConfig& config, const ContentLabel& label,
                                 const std::string& document_id, std::optional<int> page) {
  require_format(config, AdapterFormat::text);
  return extract_plaintext(read_adapter_input(file, document_id, page), config.selector_for(label), label, config.tool);
}

// ---------------------------------------------------------------------------

ExtractionRecord restrict_to_ground_truth(const ExtractionRecord& record, const TokenSequence& gt_tokens,
                                          const MatchConfig& config) {
  config.validate();
  ExtractionRecord out = record;
  out.tokens.clear();
  out.unit_sizes.clear();
  if (gt_tokens.empty()) return out;

  const auto& gt = gt_tokens.tokens();
  for (auto& unit : record.units()) {
    const std::size_t width = std::min(unit.size(), gt.size());
    const std::string unit_text = join(unit, " ");
    bool keep = false;
    for (std::size_t start = 0; start + width <= gt.size() && !keep; ++start) {
      std::string window = gt[start];
      for (std::size_t k = 1; k < width; ++k) {
        window.push_back(' ');
        window.append(gt[start + k]);
      }
      keep = lev_ratio(unit_text, window, config) >= config.threshold;
    }
    if (keep) out.add_unit(std::move(unit));
  }
  return out;
}

std::string to_jsonl(const ExtractionRecord& record) {
  std::string line = fmt::format(R"({{"tool":"{}","doc":"{}","page":{},"label":"{}","tokens":[)",
                                 json_escape(record.tool), json_escape(record.document_id),
                                 record.page ? std::to_string(*record.page) : "null", record.label.name());
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    if (i) line.push_back(',');
    line += "\"" + json_escape(record.tokens[i]) + "\"";
  }
  line += "],\"units\":[";
  for (std::size_t i = 0; i < record.unit_sizes.size(); ++i) {
    if (i) line.push_back(',');
    line += std::to_string(record.unit_sizes[i]);
  }
  line += "]}";
  return line;
}

void write_records_jsonl(const std::vector<ExtractionRecord>& records, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& record : records) out << to_jsonl(record) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace iebench
