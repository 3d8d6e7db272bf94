#include "tbg/operators.hpp"

#include <stdexcept>

namespace tbg {

namespace {

struct Entry {
  int row, col;
  cplx val;
};

// the two potential blocks of a 2-component operator at component offset c0; the entry
// landing on momentum j is scaled by f(j)
template <class Scale>
void shift_entries(std::vector<Entry>& out, const PlaneWaveBasis& b, const PotentialSpec& pot, cplx alpha,
                   int c0, Scale f) {
  auto sh = potential_shifts(pot);
  const int n = b.nmom();
  for (int i = 0; i < n; ++i) {
    const auto& g = b.shifts[i];
    for (std::size_t m = 0; m < sh.size(); ++m) {
      cplx c = alpha * pot.modes[m].coeff;
      // U: second component -> first, momentum raised by q
      int j = b.find(g[0] + sh[m][0], g[1] + sh[m][1]);
      if (j >= 0) out.push_back({c0 * n + j, (c0 + 1) * n + i, c * f(j)});
      // U(-z): first component -> second, momentum lowered by q
      j = b.find(g[0] - sh[m][0], g[1] - sh[m][1]);
      if (j >= 0) out.push_back({(c0 + 1) * n + j, c0 * n + i, c * f(j)});
    }
  }
}

std::vector<Entry> D_entries(const PlaneWaveBasis& b, const PotentialSpec& pot, cplx alpha, int c0) {
  std::vector<Entry> e;
  const int n = b.nmom();
  for (int i = 0; i < n; ++i) {
    e.push_back({c0 * n + i, c0 * n + i, b.momenta[i]});
    e.push_back({(c0 + 1) * n + i, (c0 + 1) * n + i, b.momenta[i]});
  }
  shift_entries(e, b, pot, alpha, c0, [](int) { return 1.0; });
  return e;
}

std::vector<Entry> H_entries(const PlaneWaveBasis& b, const PotentialSpec& pot, double m, cplx alpha) {
  const int n = b.nmom();
  // D acts from the first spinor (components 0,1) to the second (components 2,3)
  std::vector<Entry> d = D_entries(b, pot, alpha, 0);
  std::vector<Entry> e;
  e.reserve(2 * d.size() + 4 * n);
  for (int i = 0; i < 2 * n; ++i) {
    e.push_back({i, i, m});
    e.push_back({2 * n + i, 2 * n + i, -m});
  }
  for (const auto& x : d) {
    e.push_back({2 * n + x.row, x.col, x.val});
    e.push_back({x.col, 2 * n + x.row, std::conj(x.val)});
  }
  return e;
}

std::vector<Entry> T_entries(const PlaneWaveBasis& b, const PotentialSpec& pot) {
  std::vector<Entry> e;
  shift_entries(e, b, pot, 1.0, 0, [&](int j) { return 1.0 / b.momenta[j]; });
  return e;
}

BlockOperator densify(const std::vector<Entry>& es, BasisPtr basis, int ell, BlockKind kind, bool herm) {
  const int N = basis->size();
  std::vector<int> pos(N, -1);
  BlockOperator op;
  for (int f = 0; f < N; ++f)
    if (ell < 0 || basis->sector_labels[f] == ell) {
      pos[f] = int(op.support.size());
      op.support.push_back(f);
    }
  if (op.support.empty()) throw std::invalid_argument("empty sector");
  const int d = int(op.support.size());
  op.matrix = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& x : es) {
    int r = pos[x.row], c = pos[x.col];
    if (r >= 0 && c >= 0) op.matrix(r, c) += x.val;
  }
  op.basis = std::move(basis);
  op.kind = kind;
  op.hermitian = herm;
  return op;
}

void check_T_input(cplx k, const PlaneWaveBasis& b) {
  if (b.components != 2) throw std::invalid_argument("assemble_T needs a 2-component basis");
  if (std::abs(k - b.k) > 1e-14) throw std::invalid_argument("k does not match the basis offset");
  if (distance_to_dual_lattice(k) < 1e-8)
    throw std::invalid_argument("k lies on the dual lattice: 2D + k is not invertible, choose another k");
  for (const auto& p : b.momenta)
    if (std::abs(p) < 1e-10) throw std::invalid_argument("singular resolvent 1/p in the basis, choose another k");
}

}  // namespace

BlockOperator assemble_D(cplx alpha, BasisPtr basis, const PotentialSpec& pot) {
  if (basis->components != 2) throw std::invalid_argument("assemble_D needs a 2-component basis");
  return densify(D_entries(*basis, pot, alpha, 0), basis, -1, BlockKind::D, false);
}

BlockOperator assemble_H(double m, cplx alpha, cplx k, BasisPtr basis, const PotentialSpec& pot) {
  if (basis->components != 4) throw std::invalid_argument("assemble_H needs a 4-component basis");
  if (std::abs(k - basis->k) > 1e-14) throw std::invalid_argument("k does not match the basis offset");
  if (m < 0) throw std::invalid_argument("mass must be nonnegative");
  return densify(H_entries(*basis, pot, m, alpha), basis, -1, BlockKind::H, true);
}

BlockOperator assemble_T(cplx k, BasisPtr basis, const PotentialSpec& pot) {
  check_T_input(k, *basis);
  return densify(T_entries(*basis, pot), basis, -1, BlockKind::T, false);
}

BlockOperator sector_restrict(const BlockOperator& op, int ell) {
  std::vector<int> pos;
  for (int r = 0; r < op.dim(); ++r)
    if (op.basis->sector_labels[op.support[r]] == ell) pos.push_back(r);
  if (pos.empty()) throw std::invalid_argument("empty sector");
  BlockOperator out;
  const int d = int(pos.size());
  out.matrix.resize(d, d);
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a) out.matrix(a, c) = op.matrix(pos[a], pos[c]);
  out.basis = op.basis;
  out.support.resize(d);
  for (int a = 0; a < d; ++a) out.support[a] = op.support[pos[a]];
  out.kind = op.kind;
  out.hermitian = op.hermitian;
  return out;
}

Eigen::SparseMatrix<cplx> sparse_T(const PlaneWaveBasis& basis, const PotentialSpec& pot) {
  check_T_input(basis.k, basis);
  std::vector<Eigen::Triplet<cplx>> tr;
  for (const auto& e : T_entries(basis, pot)) tr.emplace_back(e.row, e.col, e.val);
  Eigen::SparseMatrix<cplx> M(basis.size(), basis.size());
  M.setFromTriplets(tr.begin(), tr.end());
  return M;
}

BlockOperator sector_T(const PotentialSpec& pot, cplx k, double cutoff, int ell) {
  auto b = share(enumerate_basis(k, cutoff, 2, true));
  check_T_input(k, *b);
  return densify(T_entries(*b, pot), b, ell, BlockKind::T, false);
}

BlockOperator sector_D(const PotentialSpec& pot, cplx alpha, cplx k, double cutoff, int ell) {
  auto b = share(enumerate_basis(k, cutoff, 2));
  return densify(D_entries(*b, pot, alpha, 0), b, ell, BlockKind::D, false);
}

BlockOperator sector_H(const PotentialSpec& pot, double m, cplx alpha, cplx k, double cutoff, int ell) {
  if (m < 0) throw std::invalid_argument("mass must be nonnegative");
  auto b = share(enumerate_basis(k, cutoff, 4));
  return densify(H_entries(*b, pot, m, alpha), b, ell, BlockKind::H, true);
}

}  // namespace tbg
