#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dmilp/model.hpp"

namespace dmilp {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& context) {
  if (!obj.is_object()) throw ParseError(context + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(context + ": missing field \"" + key + "\"");
  return *it;
}

Vector read_vector(const json& j, const std::string& context) {
  if (!j.is_array()) throw ParseError(context + ": expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError(context + "[" + std::to_string(i) + "]: expected a number");
    v.push_back(j[i].get<double>());
  }
  return v;
}

// Row-major nested array. An empty array is a 0-row matrix of the given width.
Matrix read_matrix(const json& j, std::size_t width, const std::string& context) {
  if (!j.is_array()) throw ParseError(context + ": expected an array of rows");
  if (j.empty()) return Matrix(0, width);
  Matrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = read_vector(j[r], context + "[" + std::to_string(r) + "]");
    if (m.rows() > 0 && row.size() != m.cols())
      throw ValidationError(ValidationKind::DimensionMismatch,
                            context + ": ragged rows (row " + std::to_string(r) + ")");
    m.append_row(row);
  }
  return m;
}

json write_matrix(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(Vector(row.begin(), row.end()));
  }
  return rows;
}

json to_json(const CoupledInstance& instance) {
  json agents = json::array();
  for (const auto& a : instance.agents) {
    json integrality = json::array();
    for (bool f : a.integrality) integrality.push_back(f);
    agents.push_back({{"c", a.c},
                      {"A", write_matrix(a.A)},
                      {"D", write_matrix(a.D)},
                      {"d", a.d},
                      {"integrality", integrality},
                      {"lb", a.lb},
                      {"ub", a.ub}});
  }
  return {{"format_version", kInstanceFormatVersion},
          {"name", instance.name},
          {"b", instance.b},
          {"agents", agents}};
}

}  // namespace

CoupledInstance parse_instance(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }

  const json& version = require(root, "format_version", "instance");
  if (!version.is_number_integer() || version.get<int>() != kInstanceFormatVersion)
    throw ParseError("instance: unsupported format_version " + version.dump());

  CoupledInstance instance;
  if (const auto it = root.find("name"); it != root.end() && it->is_string())
    instance.name = it->get<std::string>();
  instance.b = read_vector(require(root, "b", "instance"), "b");

  const json& agents = require(root, "agents", "instance");
  if (!agents.is_array()) throw ParseError("agents: expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string ctx = "agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    AgentProblem agent;
    agent.id = i;
    agent.c = read_vector(require(a, "c", ctx), ctx + ".c");
    const std::size_t n = agent.c.size();
    agent.A = read_matrix(require(a, "A", ctx), n, ctx + ".A");
    agent.D = read_matrix(require(a, "D", ctx), n, ctx + ".D");
    agent.d = read_vector(require(a, "d", ctx), ctx + ".d");
    const json& integrality = require(a, "integrality", ctx);
    if (!integrality.is_array()) throw ParseError(ctx + ".integrality: expected an array");
    for (std::size_t j = 0; j < integrality.size(); ++j) {
      if (!integrality[j].is_boolean())
        throw ParseError(ctx + ".integrality[" + std::to_string(j) + "]: expected a boolean");
      agent.integrality.push_back(integrality[j].get<bool>());
    }
    // Missing bounds are a validation failure (Unbounded), not a parse failure.
    const auto bound = [&](const char* key, double fill) {
      const auto it = a.find(key);
      if (it == a.end() || it->is_null()) return Vector(n, fill);
      Vector v;
      for (std::size_t j = 0; j < it->size(); ++j) {
        const json& e = (*it)[j];
        if (e.is_null()) {
          v.push_back(fill);
        } else if (e.is_number()) {
          v.push_back(e.get<double>());
        } else {
          throw ParseError(ctx + "." + key + "[" + std::to_string(j) + "]: expected a number");
        }
      }
      return v;
    };
    agent.lb = bound("lb", -std::numeric_limits<double>::infinity());
    agent.ub = bound("ub", std::numeric_limits<double>::infinity());
    instance.agents.push_back(std::move(agent));
  }
  return instance;
}

std::string serialize_instance(const CoupledInstance& instance) {
  return to_json(instance).dump(2) + "\n";
}

CoupledInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  CoupledInstance instance = parse_instance(buffer.str());
  if (instance.name.empty()) instance.name = path.stem().string();
  validate(instance);
  return instance;
}

void save_instance(const CoupledInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << serialize_instance(instance);
  if (!out) throw Error("I/O failure writing " + path.string());
}

std::string fingerprint(const CoupledInstance& instance) {
  const std::string text = to_json(instance).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dmilp
