#include "chemserve/wire.h"

#include <yaml-cpp/yaml.h>

namespace chemserve {
namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

void xml_escape(std::string &out, std::string_view text) {
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
}

std::string singular(std::string_view plural) {
  for (Resource r : all_resources()) {
    if (schema(r).plural == plural) {
      return std::string(schema(r).name);
    }
  }
  return "item";
}

void xml_node(std::string &out, const std::string &name, const Json &value) {
  if (value.is_null()) {
    out += "<" + name + " null=\"true\"/>";
    return;
  }
  out += "<" + name + ">";
  if (value.is_object()) {
    for (const auto &[key, child] : value.items()) {
      xml_node(out, key, child);
    }
  } else if (value.is_array()) {
    const std::string item = singular(name);
    for (const Json &child : value) {
      xml_node(out, item, child);
    }
  } else if (value.is_string()) {
    xml_escape(out, value.get_ref<const std::string &>());
  } else {
    out += value.dump();
  }
  out += "</" + name + ">";
}

void yaml_node(YAML::Emitter &out, const Json &value) {
  if (value.is_object()) {
    if (value.empty()) {
      out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
      return;
    }
    out << YAML::BeginMap;
    for (const auto &[key, child] : value.items()) {
      out << YAML::Key << key << YAML::Value;
      yaml_node(out, child);
    }
    out << YAML::EndMap;
  } else if (value.is_array()) {
    if (value.empty()) {
      out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
      return;
    }
    out << YAML::BeginSeq;
    for (const Json &child : value) {
      yaml_node(out, child);
    }
    out << YAML::EndSeq;
  } else if (value.is_string()) {
    out << YAML::DoubleQuoted << value.get<std::string>();
  } else if (value.is_null()) {
    out << YAML::Null;
  } else {
    out << value.dump();
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view content_type(WireFormat format) {
  switch (format) {
  case WireFormat::kJson: return "application/json";
  case WireFormat::kJsonp: return "application/javascript";
  case WireFormat::kXml: return "application/xml";
  case WireFormat::kYaml: return "application/yaml";
  }
  return "application/octet-stream";
}

std::optional<WireFormat> format_from_name(std::string_view name) {
  if (name == "json") return WireFormat::kJson;
  if (name == "jsonp") return WireFormat::kJsonp;
  if (name == "xml") return WireFormat::kXml;
  if (name == "yaml") return WireFormat::kYaml;
  return std::nullopt;
}

std::optional<WireFormat> format_from_accept(std::string_view accept) {
  while (!accept.empty()) {
    const auto comma = accept.find(',');
    std::string_view item = accept.substr(0, comma);
    accept = comma == std::string_view::npos ? std::string_view {}
                                             : accept.substr(comma + 1);
    item = item.substr(0, item.find(';'));
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "application/json" || item == "*/*") return WireFormat::kJson;
    if (item == "application/javascript" || item == "text/javascript")
      return WireFormat::kJsonp;
    if (item == "application/xml" || item == "text/xml") return WireFormat::kXml;
    if (item == "application/yaml" || item == "application/x-yaml" ||
        item == "text/yaml")
      return WireFormat::kYaml;
  }
  return std::nullopt;
}

bool valid_callback(std::string_view name) {
  if (name.empty() || name.size() > 128) {
    return false;
  }
  bool at_start = true;
  for (char c : name) {
    if (c == '.') {
      if (at_start) return false;
      at_start = true;
      continue;
    }
    if (at_start ? !ident_start(c) : !ident_char(c)) {
      return false;
    }
    at_start = false;
  }
  return !at_start;
}

std::string to_json_text(const Json &doc) { return doc.dump(); }

std::string to_jsonp_text(const Json &doc, std::string_view callback) {
  return std::string(callback) + "(" + doc.dump() + ");";
}

std::string to_xml_text(const Json &doc, std::string_view root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  xml_node(out, std::string(root), doc);
  out += '\n';
  return out;
}

std::string to_yaml_text(const Json &doc) {
  YAML::Emitter out;
  yaml_node(out, doc);
  return std::string(out.c_str()) + "\n";
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      const int hi = hex_value(text[i + 1]);
      const int lo = hex_value(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' ||
        c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

}  // namespace chemserve
