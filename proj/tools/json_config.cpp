#include "json_config.hpp"

#include <json.hpp>

#include "mvsis/io.hpp"

namespace mvsis::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string scalar_text(const Json& j, const std::string& name) {
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
  if (j.is_number()) return io::format_double(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  throw CLI::ConversionError("config value for '" + name + "' must be a scalar or a list of scalars");
}

CLI::ConfigItem make_item(const std::string& name, const Json& value, std::vector<std::string> parents) {
  CLI::ConfigItem item;
  item.name = name;
  item.parents = std::move(parents);
  if (value.is_object()) {
    item.inputs = {value.dump()};
  } else if (value.is_array()) {
    for (const auto& v : value) item.inputs.push_back(scalar_text(v, name));
  } else {
    item.inputs = {scalar_text(value, name)};
  }
  return item;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  Json out = Json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_configurable() == false) continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1) {
        out[name] = results.front();
      } else {
        out[name] = results;
      }
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  Json doc;
  try {
    doc = Json::parse(input);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
  std::vector<CLI::ConfigItem> items;
  const std::vector<std::string> parents = section_.empty() ? std::vector<std::string>{}
                                                            : std::vector<std::string>{section_};
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() && key == section_) {
      for (const auto& [inner, v] : value.items()) items.push_back(make_item(inner, v, parents));
    } else if (value.is_object() && key != "model") {
      continue;
    } else {
      items.push_back(make_item(key, value, parents));
    }
  }
  return items;
}

}  // namespace mvsis::cli
