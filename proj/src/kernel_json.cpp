/* Copyright 2026 The bnse Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnse/error.hpp"
#include "bnse/kernels.hpp"

namespace bnse {

namespace {

double number(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number()) {
    throw InputError(std::string("kernel spec: missing numeric field '") + key + "'");
  }
  return doc.at(key).get<double>();
}

}  // namespace

KernelSpec kernel_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
    throw InputError("kernel spec: expected an object with a string 'type'");
  }
  const auto type = doc.at("type").get<std::string>();
  KernelSpec spec;
  if (type == "sm") {
    if (!doc.contains("components") || !doc.at("components").is_array()) {
      throw InputError("kernel spec: 'sm' needs a 'components' array");
    }
    std::vector<SMComponent> comps;
    for (const auto& c : doc.at("components")) {
      comps.push_back({number(c, "sigma2"), number(c, "gamma"), number(c, "theta")});
    }
    spec.kernel = std::make_shared<SMKernel>(std::move(comps));
  } else if (type == "se") {
    spec.kernel = std::make_shared<SquaredExponentialKernel>(number(doc, "sigma2"),
                                                             number(doc, "lengthscale"));
  } else if (type == "matern" || type == "laplace") {
    const double nu = type == "laplace" ? 0.5 : number(doc, "nu");
    spec.kernel =
        std::make_shared<MaternKernel>(nu, number(doc, "sigma2"), number(doc, "lengthscale"));
  } else if (type == "sinc") {
    spec.kernel = std::make_shared<SincKernel>(number(doc, "sigma2"), number(doc, "bandwidth"));
  } else if (type == "white") {
    spec.kernel = std::make_shared<WhiteKernel>(number(doc, "sigma2"));
  } else {
    throw InputError("kernel spec: unknown type '" + type + "'");
  }
  if (doc.contains("noise_sigma2")) spec.noise.sigma2 = number(doc, "noise_sigma2");
  spec.noise.validate();
  return spec;
}

nlohmann::json kernel_spec_to_json(const KernelSpec& spec) {
  auto doc = spec.kernel->to_json();
  doc["noise_sigma2"] = spec.noise.sigma2;
  return doc;
}

KernelSpec load_kernel_spec(const std::string& path_or_json) {
  const auto first = path_or_json.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && path_or_json[first] == '{') {
    try {
      return kernel_spec_from_json(nlohmann::json::parse(path_or_json));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("kernel spec: invalid JSON: ") + e.what());
    }
  }
  std::ifstream in(path_or_json);
  if (!in) throw InputError("kernel spec: cannot open '" + path_or_json + "'");
  try {
    return kernel_spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("kernel spec '" + path_or_json + "': invalid JSON: " + e.what());
  }
}

}  // namespace bnse
