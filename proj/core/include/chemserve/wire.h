#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "chemserve/records.h"

namespace chemserve {

enum class WireFormat { kJson, kJsonp, kXml, kYaml };

std::string_view content_type(WireFormat format);
// "json", "jsonp", "xml", "yaml"; nullopt otherwise.
std::optional<WireFormat> format_from_name(std::string_view name);
// First recognised media type in an Accept header; nullopt when none is.
std::optional<WireFormat> format_from_accept(std::string_view accept);

// JavaScript identifier, optionally dotted ("cb", "jQuery.cb_1").
bool valid_callback(std::string_view name);

std::string to_json_text(const Json &doc);
std::string to_jsonp_text(const Json &doc, std::string_view callback);

// Objects become child elements in key order; an array under key "things"
// becomes <things><thing>...</thing>...</things> (singular by resource name,
// otherwise "item"); null becomes <key null="true"/>. Numbers use the same
// text as the JSON encoding.
std::string to_xml_text(const Json &doc, std::string_view root);

// Block-style YAML; strings are always double-quoted, null is ~.
std::string to_yaml_text(const Json &doc);

// Percent-decodes once. "+" is left as is. Malformed escapes are kept
// verbatim.
std::string percent_decode(std::string_view text);
// Encodes everything outside the RFC 3986 unreserved set.
std::string percent_encode(std::string_view text);

}  // namespace chemserve
