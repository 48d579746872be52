#pragma once

// Reference values computed without the library.

namespace oracle {

// Green function of -u'' on (0,1) with zero Dirichlet data.
double interval_green(double x, double y);

// Smallest eigenvalue of the 3-point Dirichlet Laplacian on (0,1), mesh h.
double discrete_dirichlet_eig(double h);

// Whole-space Green function of -Laplace in d = 3.
double green_r3(double r);

// min of int |u'|^2 over (0,1) subject to int u^4 = 1, by shooting on
// -w'' = w^3, w(0) = 0, w'(0) = 1 with classical RK4.
double shooting_kappa(int steps = 200000);

}  // namespace oracle
