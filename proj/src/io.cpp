#include "tplearn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tpl {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
  if (static_cast<int>(header.size()) != data.cols()) {
    throw std::invalid_argument("write_csv: header/column mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  for (size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  for (int r = 0; r < data.rows(); ++r) {
    for (int c = 0; c < data.cols(); ++c) {
      out << fmt17(data(r, c)) << (c + 1 < data.cols() ? "," : "\n");
    }
  }
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> CsvTable::columns(const std::string& prefix) const {
  std::vector<int> idx;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind(prefix, 0) == 0) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_csv: cannot open " + path);
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_csv: empty file " + path);
  }
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.header.size()) {
      throw std::runtime_error("read_csv: ragged row in " + path);
    }
    rows.push_back(std::move(row));
  }
  table.data.resize(rows.size(), table.header.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) table.data(r, c) = rows[r][c];
  }
  return table;
}

void write_demo_csv(const std::string& path, const Demonstration& demo) {
  const int n = demo.length();
  std::vector<std::string> header{"t"};
  int cols = 1;
  auto add_block = [&](const std::string& prefix, int count) {
    for (int i = 0; i < count; ++i) header.push_back(prefix + std::to_string(i));
    cols += count;
  };
  const int nq = static_cast<int>(demo.joints.cols());
  const int nx = static_cast<int>(demo.task_state.cols());
  const int nr = static_cast<int>(demo.references.cols());
  const int nxi = static_cast<int>(demo.xi.cols());
  if (demo.joints.size() > 0) add_block("q_", nq);
  if (demo.task_state.size() > 0) add_block("x_", nx);
  if (demo.references.size() > 0) add_block("ref_", nr);
  if (demo.xi.size() > 0) add_block("xi_", nxi);
  std::vector<std::pair<int, int>> jac_shapes;
  if (!demo.jacobians.empty()) {
    for (size_t task = 0; task < demo.jacobians.front().size(); ++task) {
      const auto& J = demo.jacobians.front()[task];
      jac_shapes.emplace_back(static_cast<int>(J.rows()), static_cast<int>(J.cols()));
      for (int r = 0; r < J.rows(); ++r) {
        for (int c = 0; c < J.cols(); ++c) {
          header.push_back("J" + std::to_string(task) + "_" + std::to_string(r) + "_" +
                           std::to_string(c));
          ++cols;
        }
      }
    }
  }
  if (demo.object_pose.size() > 0) add_block("obj_", static_cast<int>(demo.object_pose.size()));

  Eigen::MatrixXd data(n, cols);
  for (int t = 0; t < n; ++t) {
    int at = 0;
    data(t, at++) = demo.times(t);
    if (demo.joints.size() > 0) {
      data.row(t).segment(at, nq) = demo.joints.row(t);
      at += nq;
    }
    if (demo.task_state.size() > 0) {
      data.row(t).segment(at, nx) = demo.task_state.row(t);
      at += nx;
    }
    if (demo.references.size() > 0) {
      data.row(t).segment(at, nr) = demo.references.row(t);
      at += nr;
    }
    if (demo.xi.size() > 0) {
      data.row(t).segment(at, nxi) = demo.xi.row(t);
      at += nxi;
    }
    if (!demo.jacobians.empty()) {
      for (const auto& J : demo.jacobians[t]) {
        for (int r = 0; r < J.rows(); ++r) {
          for (int c = 0; c < J.cols(); ++c) data(t, at++) = J(r, c);
        }
      }
    }
    if (demo.object_pose.size() > 0) {
      data.row(t).segment(at, demo.object_pose.size()) = demo.object_pose.transpose();
      at += static_cast<int>(demo.object_pose.size());
    }
  }
  write_csv(path, header, data);
}

Demonstration read_demo_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int n = static_cast<int>(table.data.rows());
  Demonstration demo;
  const int t_col = table.column("t");
  if (t_col < 0) {
    throw std::runtime_error("read_demo_csv: missing time column in " + path);
  }
  demo.times = table.data.col(t_col);

  auto load_block = [&](const std::string& prefix) -> Eigen::MatrixXd {
    const std::vector<int> idx = table.columns(prefix);
    Eigen::MatrixXd block(n, idx.size());
    for (size_t i = 0; i < idx.size(); ++i) block.col(i) = table.data.col(idx[i]);
    return block;
  };
  if (!table.columns("q_").empty()) demo.joints = load_block("q_");
  if (!table.columns("x_").empty()) demo.task_state = load_block("x_");
  if (!table.columns("ref_").empty()) demo.references = load_block("ref_");
  if (!table.columns("xi_").empty()) demo.xi = load_block("xi_");
  if (!table.columns("obj_").empty()) {
    demo.object_pose = load_block("obj_").row(0).transpose();
  }

  // Jacobian columns are J{task}_{row}_{col}, tasks numbered consecutively.
  std::vector<std::vector<int>> jac_cols;
  for (int task = 0;; ++task) {
    const std::vector<int> idx = table.columns("J" + std::to_string(task) + "_");
    if (idx.empty()) break;
    jac_cols.push_back(idx);
  }
  if (!jac_cols.empty()) {
    const int nq = static_cast<int>(demo.joints.cols());
    demo.jacobians.resize(n);
    for (int t = 0; t < n; ++t) {
      for (const auto& idx : jac_cols) {
        const int rows = static_cast<int>(idx.size()) / nq;
        Eigen::MatrixXd J(rows, nq);
        int at = 0;
        for (int r = 0; r < rows; ++r) {
          for (int c = 0; c < nq; ++c) J(r, c) = table.data(t, idx[at++]);
        }
        demo.jacobians[t].push_back(J);
      }
    }
  }
  return demo;
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const size_t rows = j.size();
  const size_t cols = rows > 0 ? j[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

nlohmann::json quat_to_json(const Quat& q) {
  return nlohmann::json{q.w(), q.vec().x(), q.vec().y(), q.vec().z()};
}

Quat quat_from_json(const nlohmann::json& j) {
  return Quat(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>());
}

nlohmann::json gmm_to_json(const Gmm& model) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& g : model.components) {
    comps.push_back({{"mean", to_json(g.mean)}, {"cov", to_json(g.cov)}});
  }
  return {{"priors", to_json(model.priors)}, {"components", comps}};
}

Gmm gmm_from_json(const nlohmann::json& j) {
  Gmm model;
  model.priors = vector_from_json(j.at("priors"));
  for (const auto& c : j.at("components")) {
    model.components.push_back(
        Gaussian{vector_from_json(c.at("mean")), matrix_from_json(c.at("cov"))});
  }
  return model;
}

nlohmann::json tpgmm_to_json(const TpGmm& model) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& row : model.components) {
    nlohmann::json per_frame = nlohmann::json::array();
    for (const auto& g : row) {
      per_frame.push_back({{"mean", to_json(g.mean)}, {"cov", to_json(g.cov)}});
    }
    comps.push_back(per_frame);
  }
  return {{"priors", to_json(model.priors)},
          {"frames", model.frames},
          {"components", comps}};
}

TpGmm tpgmm_from_json(const nlohmann::json& j) {
  TpGmm model;
  model.priors = vector_from_json(j.at("priors"));
  model.frames = j.at("frames").get<std::vector<std::string>>();
  for (const auto& row : j.at("components")) {
    std::vector<Gaussian> per_frame;
    for (const auto& c : row) {
      per_frame.push_back(
          Gaussian{vector_from_json(c.at("mean")), matrix_from_json(c.at("cov"))});
    }
    model.components.push_back(std::move(per_frame));
  }
  return model;
}

nlohmann::json priority_model_to_json(const PriorityModel& model) {
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : model.hierarchies) {
    hs.push_back({{"label", h.label}, {"order", h.order}});
  }
  return {{"tpgmm", tpgmm_to_json(model.model)},
          {"hierarchies", hs},
          {"task_dims", model.task_dims},
          {"gain", model.gain}};
}

PriorityModel priority_model_from_json(const nlohmann::json& j) {
  PriorityModel model;
  model.model = tpgmm_from_json(j.at("tpgmm"));
  for (const auto& h : j.at("hierarchies")) {
    model.hierarchies.push_back(
        Hierarchy{h.at("order").get<std::vector<int>>(), h.at("label").get<std::string>()});
  }
  model.task_dims = j.at("task_dims").get<std::vector<int>>();
  model.gain = j.at("gain").get<double>();
  return model;
}

nlohmann::json chain_to_json(const SerialChain& chain) {
  nlohmann::json j;
  if (chain.type() == ChainType::kPlanar) {
    j["type"] = "planar";
    j["links"] = chain.link_lengths();
  } else {
    j["type"] = "spatial";
    nlohmann::json links = nlohmann::json::array();
    for (const auto& joint : chain.spatial_joints()) {
      links.push_back({{"axis", {joint.axis.x(), joint.axis.y(), joint.axis.z()}},
                       {"offset", {joint.offset.x(), joint.offset.y(), joint.offset.z()}}});
    }
    j["links"] = links;
  }
  if (chain.has_branches()) {
    j["branches"] = {{"left", chain.branch_joints(Branch::kLeft)},
                     {"right", chain.branch_joints(Branch::kRight)}};
  }
  return j;
}

SerialChain chain_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "planar") {
    auto links = j.at("links").get<std::vector<double>>();
    if (j.contains("branches")) {
      Branches b{j["branches"].at("left").get<std::vector<int>>(),
                 j["branches"].at("right").get<std::vector<int>>()};
      return SerialChain::planar_branched(std::move(links), std::move(b));
    }
    return SerialChain::planar(std::move(links));
  }
  if (type == "spatial") {
    std::vector<SpatialJoint> joints;
    for (const auto& l : j.at("links")) {
      SpatialJoint joint;
      joint.axis = vector_from_json(l.at("axis"));
      joint.offset = vector_from_json(l.at("offset"));
      joints.push_back(joint);
    }
    return SerialChain::spatial(std::move(joints));
  }
  throw std::invalid_argument("chain_from_json: unknown chain type " + type);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_json: cannot open " + path);
  }
  out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_json: cannot open " + path);
  }
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace tpl
