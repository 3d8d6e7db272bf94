#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "tbg/basis.hpp"
#include "tbg/potential.hpp"

namespace tbg {

enum class BlockKind { D, H, T, Generic };

struct BlockOperator {
  Eigen::MatrixXcd matrix;
  std::shared_ptr<const PlaneWaveBasis> basis;
  std::vector<int> support;  // flat basis index of each row/column
  BlockKind kind = BlockKind::Generic;
  bool hermitian = false;

  int dim() const { return int(matrix.rows()); }
};

using BasisPtr = std::shared_ptr<const PlaneWaveBasis>;

inline BasisPtr share(PlaneWaveBasis b) { return std::make_shared<const PlaneWaveBasis>(std::move(b)); }

// D(alpha) + k with the free part diagonal (multiplication by p) and the potential as
// momentum shifts; shifts leaving the ball are dropped
BlockOperator assemble_D(cplx alpha, BasisPtr basis, const PotentialSpec& pot);

// [[m, (D+k)^*], [D+k, -m]]; k must equal basis->k
BlockOperator assemble_H(double m, cplx alpha, cplx k, BasisPtr basis, const PotentialSpec& pot);

// (2 D_zbar + k)^{-1} [[0, U], [U(-.), 0]]
BlockOperator assemble_T(cplx k, BasisPtr basis, const PotentialSpec& pot);

// compression to the basis vectors of sector ell
BlockOperator sector_restrict(const BlockOperator& op, int ell);

// sparse T on the full basis (all sectors)
Eigen::SparseMatrix<cplx> sparse_T(const PlaneWaveBasis& basis, const PotentialSpec& pot);

// sector ell of T at (k, cutoff)
BlockOperator sector_T(const PotentialSpec& pot, cplx k, double cutoff, int ell = 0);

// sector ell of D(alpha) + k
BlockOperator sector_D(const PotentialSpec& pot, cplx alpha, cplx k, double cutoff, int ell = 0);

// sector ell of H_k(m, alpha)
BlockOperator sector_H(const PotentialSpec& pot, double m, cplx alpha, cplx k, double cutoff, int ell = 0);

}  // namespace tbg
