#include "mfdr/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfdr/csv.hpp"
#include "mfdr/errors.hpp"

namespace mfdr {

namespace {
std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}
}  // namespace

void write_path_fit(const std::string& dir, const Dataset& ds,
                    const PathFit& fit) {
  std::ostringstream path;
  path << "lambda_index,feature_index,value\n";
  for (int l = 0; l < fit.n_lambda(); ++l) {
    for (const int j : fit.selected[l]) {
      path << l << ',' << j << ',' << format_double(fit.beta(j, l)) << '\n';
    }
  }
  write_text_file(join_path(dir, "path.csv"), path.str());

  std::ostringstream meta;
  meta << "lambda_index,lambda,n_selected,kkt_violation,converged\n";
  for (int l = 0; l < fit.n_lambda(); ++l) {
    meta << l << ',' << format_double(fit.spec.lambda_grid[l]) << ','
         << fit.n_selected(l) << ',' << format_double(fit.kkt_violation[l])
         << ',' << int(fit.converged[l]) << '\n';
  }
  write_text_file(join_path(dir, "path_meta.csv"), meta.str());

  std::ostringstream feats;
  feats << "feature_index,name,col_mean,col_scale\n";
  for (int j = 0; j < ds.p(); ++j) {
    feats << j << ',' << ds.feature_names[j] << ','
          << format_double(ds.col_means[j]) << ','
          << format_double(ds.col_scales[j]) << '\n';
  }
  write_text_file(join_path(dir, "features.csv"), feats.str());
}

PathFit load_path_fit(const std::string& dir, const Dataset& ds,
                      const PenaltySpec& expected_spec) {
  expected_spec.validate();
  const CsvTable meta = read_csv(join_path(dir, "path_meta.csv"));
  const int li = meta.column("lambda_index");
  const int lam = meta.column("lambda");
  const int conv = meta.column("converged");
  const int L = static_cast<int>(expected_spec.lambda_grid.size());
  if (meta.n_rows() != L)
    throw InvalidInput("stored path has " + std::to_string(meta.n_rows()) +
                       " lambda values, expected " + std::to_string(L));
  for (int r = 0; r < meta.n_rows(); ++r) {
    if (static_cast<int>(meta.rows[r][li]) != r)
      throw InvalidInput("path_meta.csv rows out of order");
    if (meta.rows[r][lam] != expected_spec.lambda_grid[r])
      throw InvalidInput(
          "stored lambda grid does not match the requested grid");
  }

  PathFit fit;
  fit.spec = expected_spec;
  fit.beta.setZero(ds.p(), L);
  const CsvTable trip = read_csv(join_path(dir, "path.csv"));
  const int tl = trip.column("lambda_index");
  const int tj = trip.column("feature_index");
  const int tv = trip.column("value");
  for (const auto& row : trip.rows) {
    const int l = static_cast<int>(row[tl]);
    const int j = static_cast<int>(row[tj]);
    if (l < 0 || l >= L || j < 0 || j >= ds.p())
      throw InvalidInput("path.csv index out of range");
    fit.beta(j, l) = row[tv];
  }

  fit.residuals.resize(ds.n(), L);
  fit.selected.resize(L);
  fit.kkt_violation.resize(L);
  fit.converged.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    fit.residuals.col(l) = ds.y - ds.X * fit.beta.col(l);
    for (int j = 0; j < ds.p(); ++j)
      if (fit.beta(j, l) != 0.0) fit.selected[l].push_back(j);
    fit.kkt_violation[l] = kkt_violation(ds.X, ds.y, fit.beta.col(l),
                                         penalty_at(expected_spec, l));
    fit.converged[l] = meta.rows[l][conv] != 0.0 ? 1 : 0;
  }
  return fit;
}

PenaltySpec load_stored_spec(const std::string& dir) {
  const CsvTable meta = read_csv(join_path(dir, "path_meta.csv"));
  const int li = meta.column("lambda_index");
  const int lam = meta.column("lambda");
  PenaltySpec spec;
  spec.lambda_grid.resize(meta.n_rows());
  for (int r = 0; r < meta.n_rows(); ++r) {
    if (static_cast<int>(meta.rows[r][li]) != r)
      throw InvalidInput("path_meta.csv rows out of order");
    spec.lambda_grid[r] = meta.rows[r][lam];
  }

  const std::string man_path = join_path(dir, "manifest.json");
  std::ifstream in(man_path);
  if (!in) throw InvalidInput("cannot read " + man_path);
  nlohmann::json man;
  try {
    in >> man;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(man_path + ": " + e.what());
  }
  if (!man.contains("params") || !man["params"].contains("penalty"))
    throw InvalidInput(man_path + " does not record penalty parameters");
  const auto& params = man["params"];
  spec.family = family_from_name(params["penalty"].get<std::string>());
  spec.gamma = params.value("gamma", spec.gamma);
  spec.alpha = params.value("alpha", spec.alpha);
  spec.validate();
  return spec;
}

std::string mfdr_table_csv(const MfdrTable& table) {
  std::ostringstream out;
  out << "lambda,n_selected,sigma_hat,expected_fd,mfdr,method\n";
  for (const MfdrRow& row : table.rows) {
    out << format_double(row.lambda) << ',' << row.n_selected << ','
        << format_double(row.sigma_hat) << ',' << format_double(row.expected_fd)
        << ',' << format_double(row.mfdr) << ',' << table.method << '\n';
  }
  return out.str();
}

std::string mfdr_table_json(const MfdrTable& table) {
  nlohmann::json j;
  j["method"] = table.method;
  j["rows"] = nlohmann::json::array();
  for (const MfdrRow& row : table.rows) {
    nlohmann::json r;
    r["lambda"] = row.lambda;
    r["n_selected"] = row.n_selected;
    // NaN serializes as null, marking undefined entries
    r["sigma_hat"] = row.sigma_hat;
    r["expected_fd"] = row.expected_fd;
    r["mfdr"] = row.mfdr;
    r["defined"] = row.defined;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string study_csv(const StudyResult& study) {
  std::ostringstream out;
  out << "lambda,statistic,method,value\n";
  const auto emit = [&](int l, const char* stat, const std::string& method,
                        double v) {
    out << format_double(study.lambda[l]) << ',' << stat << ',' << method
        << ',' << format_double(v) << '\n';
  };
  const int L = static_cast<int>(study.lambda.size());
  for (int l = 0; l < L; ++l) {
    emit(l, "true_fd", "truth", study.mean_true_fd[l]);
    emit(l, "corr_selected", "truth", study.mean_corr_selected[l]);
    emit(l, "causative_selected", "truth", study.mean_causative_selected[l]);
    emit(l, "n_selected", "truth", study.mean_selected[l]);
    emit(l, "true_mfdr", "truth", study.true_mfdr[l]);
    emit(l, "se_true_mfdr", "truth", study.se_true_mfdr[l]);
    for (const MethodCurve& c : study.curves) {
      const std::string m = method_name(c.method);
      emit(l, "expected_fd", m, c.mean_expected_fd[l]);
      emit(l, "mfdr", m, c.mean_mfdr[l]);
      emit(l, "se_mfdr", m, c.se_mfdr[l]);
      emit(l, "rate", m, c.rate[l]);
      emit(l, "se_rate", m, c.se_rate[l]);
      emit(l, "n_defined", m, c.n_defined[l]);
    }
  }
  return out.str();
}

}  // namespace mfdr
