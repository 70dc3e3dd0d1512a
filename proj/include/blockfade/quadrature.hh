/*
Gaussian quadrature rules computed from Jacobi matrices (Golub-Welsch).

The Rayleigh gain integral substitutes t = h^2/(2 sigma_h^2), turning the
fading density into the exact exponential weight e^{-t}. The integrands met
here contain e^{beta sqrt(t)}, which is not analytic at t = 0; splitting it
into cosh(beta sqrt(t)) (analytic) plus sqrt(t) * sinhc(beta sqrt(t))
(analytic times sqrt(t)) and pairing a plain Gauss-Laguerre rule with a
generalized alpha = 1/2 rule restores geometric convergence. Both node sets
are stored mapped back to gain space, h = sigma_h sqrt(2 t).
*/

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace blockfade {

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix together with the first
// component of each normalized eigenvector (implicit-shift QL).
inline void tridiagonal_eigen_first_row(std::vector<double> &d,
                                        std::vector<double> &sub,
                                        std::vector<double> &first) {
	const int n = int(d.size());
	first.assign(n, 0.0);
	first[0] = 1.0;
	if (n == 1)
		return;
	std::vector<double> e(n, 0.0);
	for (int i = 0; i + 1 < n; ++i)
		e[i] = sub[i];
	for (int l = 0; l < n; ++l) {
		int iter = 0;
		int m;
		do {
			for (m = l; m < n - 1; ++m) {
				double dd = std::abs(d[m]) + std::abs(d[m + 1]);
				if (std::abs(e[m]) <= 1e-15 * dd)
					break;
			}
			if (m != l) {
				if (iter++ == 60)
					throw std::runtime_error("tridiagonal eigensolver failed to converge");
				double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
				double r = std::hypot(g, 1.0);
				g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
				double s = 1.0, c = 1.0, p = 0.0;
				int i;
				for (i = m - 1; i >= l; --i) {
					double f = s * e[i];
					double b = c * e[i];
					r = std::hypot(f, g);
					e[i + 1] = r;
					if (r == 0.0) {
						d[i + 1] -= p;
						e[m] = 0.0;
						break;
					}
					s = f / r;
					c = g / r;
					g = d[i + 1] - p;
					r = (d[i] - g) * s + 2.0 * c * b;
					p = s * r;
					d[i + 1] = g + p;
					g = c * r - b;
					f = first[i + 1];
					first[i + 1] = s * first[i] + c * f;
					first[i] = c * first[i] - s * f;
				}
				if (r == 0.0 && i >= l)
					continue;
				d[l] -= p;
				e[l] = g;
				e[m] = 0.0;
			}
		} while (m != l);
	}
	// sort ascending, carrying the first-row entries along
	for (int i = 1; i < n; ++i) {
		double dv = d[i], fv = first[i];
		int j = i - 1;
		while (j >= 0 && d[j] > dv) {
			d[j + 1] = d[j];
			first[j + 1] = first[j];
			--j;
		}
		d[j + 1] = dv;
		first[j + 1] = fv;
	}
}

} // namespace detail

struct GaussRule {
	std::vector<double> nodes;
	std::vector<double> weights;
};

// Nodes/weights for integral of f(t) t^alpha e^{-t} over (0, inf).
inline GaussRule gauss_laguerre(int count, double alpha = 0.0) {
	if (count < 1)
		throw std::invalid_argument("quadrature node count must be positive");
	std::vector<double> d(count), sub(count, 0.0), first;
	for (int k = 0; k < count; ++k)
		d[k] = 2.0 * k + 1.0 + alpha;
	for (int k = 0; k + 1 < count; ++k)
		sub[k] = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
	detail::tridiagonal_eigen_first_row(d, sub, first);
	GaussRule r;
	r.nodes = d;
	r.weights.resize(count);
	double mu0 = std::tgamma(1.0 + alpha);
	for (int k = 0; k < count; ++k)
		r.weights[k] = mu0 * first[k] * first[k];
	return r;
}

// Nodes/weights for integral of f(x) e^{-x^2} over the real line.
inline GaussRule gauss_hermite(int count) {
	if (count < 1)
		throw std::invalid_argument("quadrature node count must be positive");
	std::vector<double> d(count, 0.0), sub(count, 0.0), first;
	for (int k = 0; k + 1 < count; ++k)
		sub[k] = std::sqrt((k + 1.0) / 2.0);
	detail::tridiagonal_eigen_first_row(d, sub, first);
	GaussRule r;
	r.nodes = d;
	r.weights.resize(count);
	const double mu0 = std::sqrt(std::acos(-1.0));
	for (int k = 0; k < count; ++k)
		r.weights[k] = mu0 * first[k] * first[k];
	return r;
}

// Discretization of integrals against the Rayleigh gain density. nodes and
// weights alone integrate any smooth g(h); the even/odd companion arrays
// carry the split evaluation described in the header comment. Rules without
// companion arrays (for instance the degenerate single-gain test rule) are
// evaluated by direct weighted summation.
struct QuadratureRule {
	std::vector<double> nodes;        // gain-space nodes h_k > 0
	std::vector<double> weights;      // sum to 1 against the fading density
	std::vector<double> log_weights;  // -inf where a weight underflowed
	std::vector<double> odd_nodes;    // alpha = 1/2 companion, gain space
	std::vector<double> odd_coeff;    // companion weight times sigma_h sqrt(2)/h
	std::vector<double> log_odd_coeff;
	int count = 0;

	bool has_split() const { return !odd_nodes.empty(); }
};

inline constexpr int default_quadrature_nodes = 64;

// Rule for integrating against f(h) = (h/sigma_h^2) e^{-h^2/(2 sigma_h^2)}.
inline QuadratureRule make_rayleigh_rule(double sigma_h, int count = default_quadrature_nodes) {
	if (sigma_h <= 0.0)
		throw std::invalid_argument("sigma_h must be positive");
	GaussRule even = gauss_laguerre(count, 0.0);
	GaussRule odd = gauss_laguerre(count, 0.5);
	QuadratureRule q;
	q.count = count;
	double scale = sigma_h * std::sqrt(2.0);
	q.nodes.resize(count);
	q.weights = even.weights;
	q.log_weights.resize(count);
	q.odd_nodes.resize(count);
	q.odd_coeff.resize(count);
	q.log_odd_coeff.resize(count);
	for (int k = 0; k < count; ++k) {
		q.nodes[k] = scale * std::sqrt(even.nodes[k]);
		q.log_weights[k] = std::log(q.weights[k]);
		q.odd_nodes[k] = scale * std::sqrt(odd.nodes[k]);
		q.odd_coeff[k] = odd.weights[k] * scale / q.odd_nodes[k];
		q.log_odd_coeff[k] = std::log(q.odd_coeff[k]);
	}
	return q;
}

// Single fixed gain with unit weight: collapses the fading integral to the
// coherent channel, used to cross-check against closed forms.
inline QuadratureRule degenerate_rule(double h) {
	QuadratureRule q;
	q.count = 1;
	q.nodes = {h};
	q.weights = {1.0};
	q.log_weights = {0.0};
	return q;
}

} // namespace blockfade
