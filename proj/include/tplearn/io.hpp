#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tplearn/gaussians.hpp"
#include "tplearn/kinematics.hpp"
#include "tplearn/priority.hpp"
#include "tplearn/tpgmm.hpp"

namespace tpl {

// CSV files are comma separated with a header row; floats carry 17
// significant digits so written data round-trips bit-exact.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;

  int column(const std::string& name) const;          // -1 when absent
  std::vector<int> columns(const std::string& prefix) const;
};

CsvTable read_csv(const std::string& path);

// Demonstration CSV: t, q_*, x_*, ref_*, xi_*, J{task}_{row}_{col}, obj_*.
// Only the populated fields are written; reading restores the same fields.
void write_demo_csv(const std::string& path, const Demonstration& demo);
Demonstration read_demo_csv(const std::string& path);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json quat_to_json(const Quat& q);  // [w, x, y, z]
Quat quat_from_json(const nlohmann::json& j);

nlohmann::json gmm_to_json(const Gmm& model);
Gmm gmm_from_json(const nlohmann::json& j);

nlohmann::json tpgmm_to_json(const TpGmm& model);
TpGmm tpgmm_from_json(const nlohmann::json& j);

nlohmann::json priority_model_to_json(const PriorityModel& model);
PriorityModel priority_model_from_json(const nlohmann::json& j);

// {"type":"planar"|"spatial","links":[...],"branches":{"left":[...],"right":[...]}}
// Spatial links are {"axis":[x,y,z],"offset":[x,y,z]}.
nlohmann::json chain_to_json(const SerialChain& chain);
SerialChain chain_from_json(const nlohmann::json& j);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace tpl
