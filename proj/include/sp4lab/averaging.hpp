#pragma once

// Finite groups with real orthogonal representations, for the averaging
// inequality ||x|| <= 2 n N max_i ||x - y_i||.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sp4lab/verifiers.hpp"

namespace sp4lab {

struct FiniteRep {
  std::string name;
  int dim = 0;
  std::vector<Eigen::MatrixXd> elements;  // elements[0] is the identity
  std::vector<std::vector<int>> subgroups;
  std::vector<std::string> subgroup_names;

  int index_of(const Eigen::MatrixXd& m) const;  // -1 if absent
  int multiply(int a, int b) const;
  Eigen::MatrixXd average(const std::vector<int>& idx) const;
  Eigen::MatrixXd average() const;
};

// Closes the generators under multiplication; subgroups are given by generators too.
FiniteRep make_rep(const std::string& name, const std::vector<Eigen::MatrixXd>& generators,
                   const std::vector<std::pair<std::string, std::vector<Eigen::MatrixXd>>>& subgroup_generators);

// S3 on the plane x1 + x2 + x3 = 0, K1 = <(12)>, K2 = <(123)>.
FiniteRep make_s3_standard();
// D4 on R^2, K1 = <s>, K2 = <s r> for the reflection s and the quarter turn r.
FiniteRep make_d4_standard();

// Whether (K1 ... Kn)^N covers the group, by enumeration of products.
bool covers(const FiniteRep& rep, int N);
int minimal_cover(const FiniteRep& rep, int max_n = 16);  // 0 if none

}  // namespace sp4lab
