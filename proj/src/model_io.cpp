#include "scengen/model_io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace scengen {

using nlohmann::json;

std::string model_to_json(const ModelEstimate& theta) {
  theta.validate();
  json doc;
  doc["schema"] = kModelSchema;
  doc["q"] = theta.dictionary.q;
  doc["r"] = theta.dictionary.r;
  doc["K"] = theta.dictionary.K();

  json atoms = json::array();
  for (int k = 0; k < theta.dictionary.K(); ++k) {
    json column = json::array();
    for (int j = 0; j < theta.dictionary.t(); ++j) {
      column.push_back(theta.dictionary.atoms(j, k));
    }
    atoms.push_back(std::move(column));
  }
  doc["atoms"] = std::move(atoms);
  doc["pi"] = std::vector<double>(theta.pi.data(), theta.pi.data() + theta.pi.size());
  doc["gamma_s"] = theta.gamma_s;
  doc["gamma_e"] = theta.gamma_e;
  doc["standardization"] = {
      {"means", std::vector<double>(theta.standardization.means.data(),
                                    theta.standardization.means.data() +
                                        theta.standardization.means.size())},
      {"scales", std::vector<double>(theta.standardization.scales.data(),
                                     theta.standardization.scales.data() +
                                         theta.standardization.scales.size())}};
  return doc.dump(2) + "\n";
}

ModelEstimate model_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.contains("schema") || doc["schema"] != kModelSchema) {
    throw std::invalid_argument(
        "model file schema mismatch: expected " + std::string(kModelSchema) +
        ", found " + (doc.contains("schema") ? doc["schema"].dump() : "none"));
  }
  ModelEstimate theta;
  theta.dictionary.q = doc.at("q").get<int>();
  theta.dictionary.r = doc.at("r").get<int>();
  const int K = doc.at("K").get<int>();
  const int t = theta.dictionary.q + theta.dictionary.r;

  const auto& atoms = doc.at("atoms");
  if (static_cast<int>(atoms.size()) != K) {
    throw std::invalid_argument("model file: atom count disagrees with K");
  }
  theta.dictionary.atoms.resize(t, K);
  for (int k = 0; k < K; ++k) {
    const auto& column = atoms.at(k);
    if (static_cast<int>(column.size()) != t) {
      throw std::invalid_argument("model file: atom " + std::to_string(k) +
                                  " has wrong length");
    }
    for (int j = 0; j < t; ++j) theta.dictionary.atoms(j, k) = column.at(j).get<double>();
  }

  const auto pi = doc.at("pi").get<std::vector<double>>();
  if (static_cast<int>(pi.size()) != K) {
    throw std::invalid_argument("model file: pi has wrong length");
  }
  theta.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), pi.size());
  theta.gamma_s = doc.at("gamma_s").get<double>();
  theta.gamma_e = doc.at("gamma_e").get<double>();

  const auto means = doc.at("standardization").at("means").get<std::vector<double>>();
  const auto scales = doc.at("standardization").at("scales").get<std::vector<double>>();
  if (static_cast<int>(means.size()) != t || static_cast<int>(scales.size()) != t) {
    throw std::invalid_argument("model file: standardization has wrong length");
  }
  theta.standardization.means = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
  theta.standardization.scales = Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());

  theta.validate();
  return theta;
}

void save_model(const ModelEstimate& theta, const std::filesystem::path& path) {
  atomic_write_text(path, model_to_json(theta));
}

ModelEstimate load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

}  // namespace scengen
