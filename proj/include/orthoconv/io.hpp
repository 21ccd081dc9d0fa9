#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "orthoconv/architecture.hpp"
#include "orthoconv/convmat.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/optim.hpp"
#include "orthoconv/residual.hpp"
#include "orthoconv/spectral.hpp"

namespace orthoconv {

using json = nlohmann::json;

inline json architecture_to_json(const Architecture& arch) {
  return json{{"d", arch.d},
              {"M", arch.M},
              {"C", arch.C},
              {"k", arch.k},
              {"S", arch.S}};
}

inline Architecture architecture_from_json(const json& j) {
  require(j.contains("d") && j.contains("M") && j.contains("C") &&
              j.contains("k") && j.contains("S"),
          ErrorCode::ShapeMismatch,
          "architecture JSON needs fields d, M, C, k, S");
  Architecture arch{j.at("d").get<int>(), j.at("M").get<int>(),
                    j.at("C").get<int>(), j.at("k").get<int>(),
                    j.at("S").get<int>()};
  validate_architecture(arch);
  return arch;
}

/// Kernel file format shared library-wide: the architecture fields plus a
/// flat data array in (m, c, i[, j]) row-major order.
inline json kernel_to_json(const KernelTensor& K) {
  K.check_shape();
  json j = architecture_to_json(K.arch);
  j["data"] = K.data;
  return j;
}

inline KernelTensor kernel_from_json(const json& j) {
  KernelTensor K(architecture_from_json(j));
  require(j.contains("data") && j.at("data").is_array(),
          ErrorCode::ShapeMismatch, "kernel JSON needs a data array");
  const auto& data = j.at("data");
  require(data.size() == K.data.size(), ErrorCode::ShapeMismatch,
          "kernel data length " + std::to_string(data.size()) +
              " does not match " + K.arch.describe());
  for (std::size_t i = 0; i < K.data.size(); ++i)
    K.data[i] = data[i].get<double>();
  require(K.all_finite(), ErrorCode::ShapeMismatch,
          "kernel data contains non-finite entries");
  return K;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::ShapeMismatch, "cannot open " + path);
  out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ShapeMismatch, "cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_kernel_file(const KernelTensor& K, const std::string& path) {
  write_json_file(kernel_to_json(K), path);
}

inline KernelTensor read_kernel_file(const std::string& path) {
  return kernel_from_json(read_json_file(path));
}

/// Dense matrix dump, JSON envelope. Doubles survive the round trip at
/// full 64-bit precision.
inline json layer_matrix_to_json(const LayerMatrix& layer) {
  json j;
  j["rows"] = layer.rows();
  j["cols"] = layer.cols();
  j["padding"] = padding_name(layer.padding);
  j["N"] = layer.N;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(layer.rows() * layer.cols()));
  for (long i = 0; i < layer.matrix.rows(); ++i)
    for (long c = 0; c < layer.matrix.cols(); ++c)
      data.push_back(layer.matrix(i, c));
  j["data"] = std::move(data);
  return j;
}

/// CSV dump: one matrix row per line.
inline void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  out.precision(17);
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

inline json residual_report_to_json(const ResidualReport& report) {
  return json{{"arch", architecture_to_json(report.arch)},
              {"N", report.N},
              {"case", case_name(report.layer_case)},
              {"lorth_value", report.lorth_value},
              {"err_f", report.err_f},
              {"err_s", report.err_s},
              {"alpha", report.alpha},
              {"alpha_prime", report.alpha_prime},
              {"frobenius_identity_gap", report.frobenius_identity_gap},
              {"sandwich_satisfied", report.sandwich_satisfied},
              {"aip_epsilon", report.aip_epsilon}};
}

inline json spectrum_to_json(const SingularSpectrum& spectrum) {
  json j;
  j["mode"] =
      spectrum.mode == SingularSpectrum::Mode::Full ? "full" : "extremal";
  j["N"] = spectrum.N;
  j["arch"] = architecture_to_json(spectrum.arch);
  if (spectrum.mode == SingularSpectrum::Mode::Full) {
    j["values"] = spectrum.values;
  } else {
    j["sigma_min"] = spectrum.sigma_min;
    j["sigma_max"] = spectrum.sigma_max;
    j["iterations_used"] = spectrum.iterations_used;
  }
  j["converged"] = spectrum.converged;
  return j;
}

inline const char* kSweepCsvHeader =
    "d,M,C,k,S,ratio,lorth_final,sigma_min,sigma_max,success,seed";

inline void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  out.precision(17);
  for (const SweepRow& row : sweep.rows) {
    out << row.arch.d << ',' << row.arch.M << ',' << row.arch.C << ','
        << row.arch.k << ',' << row.arch.S << ',' << row.ratio << ','
        << row.lorth_final << ',' << row.sigma_min << ',' << row.sigma_max
        << ',' << (row.success ? 1 : 0) << ',' << row.seed << '\n';
  }
}

inline void write_stability_csv(const std::vector<StabilityRow>& rows,
                                std::ostream& out) {
  out << "N,sigma_min,sigma_max\n";
  out.precision(17);
  for (const StabilityRow& row : rows)
    out << row.N << ',' << row.sigma_min << ',' << row.sigma_max << '\n';
}

}  // namespace orthoconv
