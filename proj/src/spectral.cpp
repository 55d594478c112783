#include "mvsis/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvsis/error.hpp"
#include "mvsis/kernels.hpp"

namespace mvsis {

namespace {

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error("spectral-analysis." + op, kind, message);
}

// Adjacency lists for the graph with edge j -> i when a_ij > 0, in both directions.
struct Digraph {
  std::vector<std::vector<Index>> out;
  std::vector<std::vector<Index>> in;
};

Digraph build_digraph(const Matrix& a) {
  const Index n = a.rows();
  Digraph g{std::vector<std::vector<Index>>(static_cast<std::size_t>(n)),
            std::vector<std::vector<Index>>(static_cast<std::size_t>(n))};
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (a(i, j) > 0.0) {
        g.out[static_cast<std::size_t>(j)].push_back(i);
        g.in[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  return g;
}

std::vector<bool> reachable(const std::vector<std::vector<Index>>& adj, Index start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<Index> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

void check_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols()) fail(op, ErrorKind::dimension_mismatch, "matrix must be square");
}

double perron_root(const Matrix& block, double tol, std::size_t max_iterations) {
  const Index n = block.rows();
  if (n == 1) return std::abs(block(0, 0));

  const double shift = block.sum() / static_cast<double>(n);
  Vector v = Vector::Ones(n);
  Vector w(n);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    kernels::matvec(block, v, w);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double ratio = w(i) / v(i);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi - lo <= tol * hi) return 0.5 * (lo + hi);
    v = w + shift * v;
    v /= v.maxCoeff();
  }
  std::ostringstream os;
  os << "power iteration did not converge within the iteration cap of " << max_iterations;
  fail("spectral_radius", ErrorKind::convergence, os.str());
}

}  // namespace

std::vector<std::vector<Index>> strongly_connected_components(const Matrix& a) {
  check_square(a, "strongly_connected_components");
  const Index n = a.rows();
  const Digraph g = build_digraph(a);

  // Kosaraju: finishing order on the forward graph, then sweep the reverse graph.
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  for (Index root = 0; root < n; ++root) {
    if (visited[static_cast<std::size_t>(root)]) continue;
    std::vector<std::pair<Index, std::size_t>> stack{{root, 0}};
    visited[static_cast<std::size_t>(root)] = true;
    while (!stack.empty()) {
      auto& [v, next_edge] = stack.back();
      const auto& edges = g.out[static_cast<std::size_t>(v)];
      if (next_edge < edges.size()) {
        const Index w = edges[next_edge++];
        if (!visited[static_cast<std::size_t>(w)]) {
          visited[static_cast<std::size_t>(w)] = true;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<std::vector<Index>> components;
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (assigned[static_cast<std::size_t>(*it)]) continue;
    std::vector<Index> component;
    std::vector<Index> stack{*it};
    assigned[static_cast<std::size_t>(*it)] = true;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      component.push_back(v);
      for (Index w : g.in[static_cast<std::size_t>(v)]) {
        if (!assigned[static_cast<std::size_t>(w)]) {
          assigned[static_cast<std::size_t>(w)] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

bool is_irreducible(const Matrix& a) {
  check_square(a, "is_irreducible");
  if (a.rows() <= 1) return true;
  const Digraph g = build_digraph(a);
  const auto forward = reachable(g.out, 0);
  const auto backward = reachable(g.in, 0);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

double spectral_radius(const Matrix& m, double tol, std::size_t max_iterations) {
  check_square(m, "spectral_radius");
  if (!(tol > 0.0)) fail("spectral_radius", ErrorKind::invalid_argument, "tolerance must be positive");
  if ((m.array() < 0.0).any() || !m.allFinite()) {
    fail("spectral_radius", ErrorKind::invalid_argument, "matrix must be finite and nonnegative");
  }
  if (m.rows() == 0) return 0.0;
  tol = std::max(tol, 8.0 * std::numeric_limits<double>::epsilon());

  const auto components = strongly_connected_components(m);
  if (components.size() == 1) return perron_root(m, tol, max_iterations);

  double rho = 0.0;
  for (const auto& component : components) {
    const Index s = static_cast<Index>(component.size());
    Matrix block(s, s);
    for (Index r = 0; r < s; ++r) {
      for (Index c = 0; c < s; ++c) {
        block(r, c) = m(component[static_cast<std::size_t>(r)], component[static_cast<std::size_t>(c)]);
      }
    }
    rho = std::max(rho, perron_root(block, tol, max_iterations));
  }
  return rho;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

std::string_view to_string(Classification classification) {
  switch (classification) {
    case Classification::unique_healthy: return "unique-healthy";
    case Classification::single_survivor: return "single-survivor";
    case Classification::multi_endemic_candidates: return "multi-endemic-candidates";
  }
  return "unknown";
}

Regime regime_of(double rho, double tol) {
  if (std::abs(rho - 1.0) <= tol) return Regime::critical;
  return rho < 1.0 ? Regime::subcritical : Regime::supercritical;
}

StabilityReport classify_regimes(std::vector<double> rho, std::vector<Regime> regimes) {
  StabilityReport report;
  report.rho = std::move(rho);
  report.regimes = std::move(regimes);
  std::vector<Index> survivors;
  for (std::size_t k = 0; k < report.regimes.size(); ++k) {
    if (report.regimes[k] == Regime::supercritical) survivors.push_back(static_cast<Index>(k));
  }
  if (survivors.empty()) {
    report.classification = Classification::unique_healthy;
  } else if (survivors.size() == 1) {
    report.classification = Classification::single_survivor;
    report.survivor = survivors.front();
  } else {
    report.classification = Classification::multi_endemic_candidates;
  }
  return report;
}

Matrix threshold_matrix(const MultiVirusModel& model, Index k) {
  const auto& layer = model.layer(k);
  Matrix m = model.h() * layer.infection();
  m.diagonal().array() += 1.0 - model.h() * layer.healing().array();
  return m;
}

StabilityReport classify(const MultiVirusModel& model, double tol) {
  const AssumptionReport report = validate_parameters(model);
  if (!report.passed()) fail("classify", ErrorKind::assumption_violation, report.first_failure());
  for (Index k = 0; k < model.viruses(); ++k) {
    if (!is_irreducible(model.layer(k).infection())) {
      fail("classify", ErrorKind::assumption_violation,
           "assumption 5: infection matrix of virus " + std::to_string(k) + " is reducible");
    }
  }
  std::vector<double> rho;
  std::vector<Regime> regimes;
  for (Index k = 0; k < model.viruses(); ++k) {
    rho.push_back(spectral_radius(threshold_matrix(model, k)));
    regimes.push_back(regime_of(rho.back(), tol));
  }
  return classify_regimes(std::move(rho), std::move(regimes));
}

Regime homogeneous_threshold(const Matrix& adjacency, double beta, double delta, double tol) {
  if (!(beta > 0.0)) {
    fail("homogeneous_threshold", ErrorKind::degenerate, "infection rate beta must be positive");
  }
  const double ratio = delta / beta;
  const double rho = spectral_radius(adjacency);
  if (std::abs(rho - ratio) <= tol * std::max(1.0, ratio)) return Regime::critical;
  return rho < ratio ? Regime::subcritical : Regime::supercritical;
}

EndemicEstimate single_virus_endemic(const MultiVirusModel& model, Index k, double tol,
                                     std::size_t max_iterations) {
  if (k < 0 || k >= model.viruses()) fail("single_virus_endemic", ErrorKind::invalid_argument, "virus index out of range");
  const double rho = spectral_radius(threshold_matrix(model, k));
  if (regime_of(rho, 1e-9) != Regime::supercritical) {
    std::ostringstream os;
    os << "virus " << k << " is not supercritical (rho = " << rho << " <= 1); only the healthy state exists";
    fail("single_virus_endemic", ErrorKind::precondition, os.str());
  }

  const MultiVirusModel single(model.h(), {model.layer(k)});
  Matrix x = Matrix::Constant(model.nodes(), 1, 0.5);
  Matrix next(model.nodes(), 1);
  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    kernels::advance(single, x, next);
    const double change = (next - x).norm();
    x.swap(next);
    if (change < tol) {
      kernels::advance(single, x, next);
      const double residual = (next - x).norm();
      if (residual < tol) {
        if ((x.array() <= 0.0).any()) {
          fail("single_virus_endemic", ErrorKind::precondition,
               "fixed point is not strictly positive (infection graph not irreducible?)");
        }
        return EndemicEstimate{k, x.col(0), residual, iter};
      }
    }
  }
  std::ostringstream os;
  os << "fixed-point iteration exceeded the cap of " << max_iterations << " iterations";
  fail("single_virus_endemic", ErrorKind::convergence, os.str());
}

}  // namespace mvsis
