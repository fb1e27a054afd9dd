#pragma once

#include <string>

#include "sccuc/case_model.hpp"

namespace testutil {

inline std::string data(const std::string& name) { return std::string(SCCUC_DATA_DIR) + "/" + name; }

inline sccuc::NetworkCase load(const std::string& stem) { return sccuc::load_case_file(data(stem + ".json")); }

inline sccuc::UcInstance load_instance(const std::string& stem) {
  return sccuc::load_uc_instance_file(data(stem + "_uc.json"), load(stem));
}

// One bus, one SG, no branches.
inline sccuc::NetworkCase one_bus(double beta, double xd2) {
  sccuc::NetworkCase c;
  c.beta = beta;
  c.buses.push_back({1, 1.0, {0.5}});
  sccuc::SynchGen g;
  g.id = "G1";
  g.xd_subtransient = xd2;
  g.p_max = 1.0;
  g.inertia = 5.0;
  c.sgs.push_back(g);
  return c;
}

}  // namespace testutil
