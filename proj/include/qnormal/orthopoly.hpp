#pragma once

// Polynomial families: q-Hermite H_n(x|q), continuous q-Hermite h_n(x|q),
// Al-Salam-Chihara P_n(x|y,rho,q), Chebyshev U_n and probabilists' Hermite.
// Values come from forward three-term recurrences.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qnormal/qseries.hpp"

namespace qnormal {

inline constexpr int kMaxDegree = 64;

double q_hermite(int n, double x, QParam q);
// H_0..H_n at x written to out (out.size() must be n + 1).
void q_hermite_all(double x, QParam q, std::span<double> out);

double continuous_q_hermite(int n, double x, QParam q);

double al_salam_chihara(int n, double x, double y, double rho, QParam q);
void al_salam_chihara_all(double x, double y, double rho, QParam q, std::span<double> out);

double chebyshev_u(int n, double x);
double hermite_prob(int n, double x);

// H_n H_m = sum_j coeffs[n + m - 2j] H_{n+m-2j}
struct LinearizationTable {
  int n = 0;
  int m = 0;
  std::map<int, double> coeffs;  // result degree -> coefficient
};

LinearizationTable linearize(int n, int m, QParam q);

// Change of basis between monomials and H(.|q); index i holds the
// coefficient of x^i (resp. H_i).
std::vector<double> hermite_expand(std::span<const double> monomial, QParam q);
std::vector<double> hermite_to_monomial(std::span<const double> hermite, QParam q);

// Evaluates sum_i coeffs[i] H_i(x|q).
double hermite_series(std::span<const double> coeffs, double x, QParam q);

// |H_n(x|q)| <= W_n(q) (1-q)^{-n/2} for x in S(q), q < 1.
bool q_hermite_bound_check(int n, double x, QParam q);

}  // namespace qnormal
