#include "entbound/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace entbound {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

void require_square(const Matrix& m, const char* who) {
    if (!m.is_square()) throw NonSquare(std::string(who) + ": matrix is not square");
}

void require_symmetric(const Matrix& m, const char* who) {
    double asym = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j) {
            const double d = m(i, j) - m(j, i);
            asym += 2.0 * d * d;
        }
    if (std::sqrt(asym) > 1e-12 * (1.0 + m.frobenius_norm()))
        throw NotSymmetric(std::string(who) + ": matrix is not symmetric");
}

// EISPACK-style diagonal balancing (radix 2); similarity transform, so the
// spectrum is untouched.
void balance_in_place(Matrix& a) {
    const int n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 0; j < n; ++j) a(i, j) *= g;
                    for (int j = 0; j < n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations (elmhes). Multipliers below the subdiagonal are cleared.
void hessenberg_in_place(Matrix& a) {
    const int n = a.rows();
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        if (piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<std::complex<double>> hqr_in_place(Matrix& a) {
    const int n = a.rows();
    std::vector<double> wr(n, 0.0), wi(n, 0.0);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= kEps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn] = z;
                        wi[nn - 1] = -z;
                    }
                    nn -= 2;
                } else {
                    if (its == 60)
                        throw NoConvergence("eigenvalues: QR iteration failed to converge");
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        const double rr = x - z;
                        const double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        const double sc = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= sc;
                        q /= sc;
                        r /= sc;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(z) *
                            (std::abs(p) + std::abs(a(m - 1, m - 1)) + std::abs(a(m + 1, m + 1)));
                        if (u <= kEps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<std::complex<double>> ev(n);
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = {wr[i], wi[i]};
    return ev;
}

struct LuFactors {
    Matrix lu;
    std::vector<int> piv;
};

LuFactors lu_factor(const Matrix& a) {
    const int n = a.rows();
    LuFactors f{a, std::vector<int>(static_cast<std::size_t>(n))};
    const double scale = a.max_abs();
    for (int k = 0; k < n; ++k) {
        int p = k;
        double mx = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > mx) {
                mx = std::abs(f.lu(i, k));
                p = i;
            }
        if (mx <= static_cast<double>(n) * kEps * scale)
            throw SingularSystem("lu_solve: matrix is numerically singular");
        f.piv[static_cast<std::size_t>(k)] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
        const double d = f.lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            f.lu(i, k) /= d;
            const double lik = f.lu(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
        }
    }
    return f;
}

Matrix lu_apply(const LuFactors& f, const Matrix& b) {
    const int n = f.lu.rows();
    Matrix x = b;
    for (int k = 0; k < n; ++k) {
        const int p = f.piv[static_cast<std::size_t>(k)];
        if (p != k)
            for (int j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(p, j));
    }
    for (int j = 0; j < x.cols(); ++j) {
        for (int i = 1; i < n; ++i) {
            double s = x(i, j);
            for (int k = 0; k < i; ++k) s -= f.lu(i, k) * x(k, j);
            x(i, j) = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x(i, j);
            for (int k = i + 1; k < n; ++k) s -= f.lu(i, k) * x(k, j);
            x(i, j) = s / f.lu(i, i);
        }
    }
    return x;
}

}  // namespace

SymEig sym_eig(const Matrix& m) {
    require_square(m, "sym_eig");
    require_symmetric(m, "sym_eig");
    const int n = m.rows();
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    Matrix v = Matrix::identity(n);
    const double fnorm = a.frobenius_norm();
    bool converged = false;
    for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * static_cast<double>(n) * (1.0 + fnorm)) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t =
                    sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p), arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if (!converged) {
        // re-check: the final sweep may have finished the job
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) > 1e-12 * (1.0 + fnorm))
            throw NoConvergence("sym_eig: Jacobi sweeps exceeded the iteration cap");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    SymEig out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(j)] = a(src, src);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, src);
    }
    return out;
}

double lambda_min(const Matrix& symmetric) { return sym_eig(symmetric).values.front(); }
double lambda_max(const Matrix& symmetric) { return sym_eig(symmetric).values.back(); }

Matrix sqrt_spd(const Matrix& m) {
    const SymEig e = sym_eig(m);
    const int n = m.rows();
    Matrix out(n, n);
    for (int k = 0; k < n; ++k) {
        const double w = std::sqrt(std::max(e.values[static_cast<std::size_t>(k)], 0.0));
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    require_square(a, "eigenvalues");
    a.ensure_finite("eigenvalues input");
    if (a.rows() > 128) throw Error("eigenvalues: order above the supported cap of 128");
    if (a.rows() == 0) return {};
    if (a.rows() == 1) return {std::complex<double>(a(0, 0), 0.0)};
    Matrix work = a;
    balance_in_place(work);
    hessenberg_in_place(work);
    return hqr_in_place(work);
}

bool is_hurwitz(const Matrix& a) {
    require_square(a, "is_hurwitz");
    if (a.rows() > 64) throw Error("is_hurwitz: order above the supported cap of 64");
    for (const auto& ev : eigenvalues(a))
        if (ev.real() >= 0.0) return false;
    return true;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    require_square(a, "solve_lyapunov");
    require_square(q, "solve_lyapunov");
    if (a.rows() != q.rows())
        throw DimensionMismatch("solve_lyapunov: A and Q orders differ");
    require_symmetric(q, "solve_lyapunov(Q)");
    if (!is_hurwitz(a))
        throw NotHurwitz("solve_lyapunov: A has an eigenvalue with nonnegative real part");
    const int n = a.rows();
    const int nn = n * n;
    // column-stacked vec: (i,j) -> i + j*n; M = kron(I,A) + kron(A,I)
    Matrix m(nn, nn);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int row = i + j * n;
            for (int k = 0; k < n; ++k) {
                m(row, k + j * n) += a(i, k);
                m(row, i + k * n) += a(j, k);
            }
        }
    Matrix rhs(nn, 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) rhs(i + j * n, 0) = -q(i, j);
    Matrix x = lu_solve(m, rhs);
    Matrix p(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) p(i, j) = x(i + j * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = p(j, i) = s;
        }
    return p;
}

bool is_controllable(const Matrix& a, const Matrix& b) {
    require_square(a, "is_controllable");
    if (a.rows() != b.rows())
        throw DimensionMismatch("is_controllable: A and B row counts differ");
    const int n = a.rows();
    const int m = b.cols();
    if (n == 0) return true;
    Matrix krylov(n, n * m);
    Matrix block = b;
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) krylov(i, k * m + j) = block(i, j);
        if (k + 1 < n) block = a * block;
    }
    const Matrix gram = krylov * krylov.transpose();
    const SymEig e = sym_eig(gram);
    const double smax = std::sqrt(std::max(e.values.back(), 0.0));
    if (smax == 0.0) return false;
    const double thresh = static_cast<double>(n) * kEps * smax;
    const double smin = std::sqrt(std::max(e.values.front(), 0.0));
    return smin > thresh;
}

Matrix cholesky(const Matrix& m) {
    require_square(m, "cholesky");
    require_symmetric(m, "cholesky");
    const int n = m.rows();
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            throw NotSPD("cholesky: nonpositive pivot, matrix is not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

double logdet_spd(const Matrix& m) {
    const Matrix l = cholesky(m);
    double s = 0.0;
    for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

Matrix spd_inverse(const Matrix& m) {
    const Matrix l = cholesky(m);
    const int n = m.rows();
    Matrix inv(n, n);
    for (int col = 0; col < n; ++col) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= l(i, k) * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, col);
            inv(i, col) = s / l(i, i);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = inv(j, i) = s;
        }
    return inv;
}

Matrix lu_solve(const Matrix& a, const Matrix& b) {
    require_square(a, "lu_solve");
    if (a.rows() != b.rows()) throw DimensionMismatch("lu_solve: incompatible right-hand side");
    return lu_apply(lu_factor(a), b);
}

double transfer_sigma_max(const Matrix& a, const Matrix& b, const Matrix& c, double omega) {
    const int n = a.rows();
    const int m = b.cols();
    // (i w I - A) Z = B through the real embedding [[-A, -wI],[wI, -A]]
    Matrix big(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            big(i, j) = -a(i, j);
            big(n + i, n + j) = -a(i, j);
        }
        big(i, n + i) = -omega;
        big(n + i, i) = omega;
    }
    Matrix rhs(2 * n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) rhs(i, j) = b(i, j);
    const Matrix sol = lu_solve(big, rhs);
    Matrix x(n, m), y(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            x(i, j) = sol(i, j);
            y(i, j) = sol(n + i, j);
        }
    const Matrix u = c * x;
    const Matrix v = c * y;
    // Hermitian (CZ)^* (CZ) = S + iW realified to [[S,-W],[W,S]]
    const Matrix s = u.transpose() * u + v.transpose() * v;
    const Matrix w = u.transpose() * v - v.transpose() * u;
    Matrix e(2 * m, 2 * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            e(i, j) = s(i, j);
            e(m + i, m + j) = s(i, j);
            e(i, m + j) = -w(i, j);
            e(m + i, j) = w(i, j);
        }
    return std::sqrt(std::max(lambda_max(e), 0.0));
}

double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, double rel_tol) {
    require_square(a, "hinf_norm");
    if (b.rows() != a.rows()) throw DimensionMismatch("hinf_norm: B row count must match A");
    if (c.cols() != a.rows()) throw DimensionMismatch("hinf_norm: C column count must match A");
    if (!is_hurwitz(a)) throw NotHurwitz("hinf_norm: A is not Hurwitz");
    if (b.max_abs() == 0.0 || c.max_abs() == 0.0) return 0.0;

    const int n = a.rows();
    // frequency sweep for the lower bound; seeded by the natural frequencies
    std::vector<double> freqs{0.0};
    double wmin = std::numeric_limits<double>::max(), wmax = 0.0;
    for (const auto& ev : eigenvalues(a)) {
        const double mag = std::abs(ev);
        wmin = std::min(wmin, mag);
        wmax = std::max(wmax, mag);
        if (std::abs(ev.imag()) > 0.0) freqs.push_back(std::abs(ev.imag()));
        freqs.push_back(mag);
    }
    wmin = std::max(wmin * 1e-2, 1e-8);
    wmax = std::max(wmax * 1e2, 1.0);
    const int sweep_points = 128;
    for (int i = 0; i < sweep_points; ++i)
        freqs.push_back(wmin * std::pow(wmax / wmin, static_cast<double>(i) / (sweep_points - 1)));
    double lo = 0.0;
    for (double w : freqs) lo = std::max(lo, transfer_sigma_max(a, b, c, w));
    if (lo <= 1e-300) return lo;

    const Matrix bbt = b * b.transpose();
    const Matrix ctc = c.transpose() * c;
    const auto has_imag_axis_eig = [&](double gamma) {
        Matrix h(2 * n, 2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                h(i, j) = a(i, j);
                h(i, n + j) = bbt(i, j) / gamma;
                h(n + i, j) = -ctc(i, j) / gamma;
                h(n + i, n + j) = -a(j, i);
            }
        const double scale = h.frobenius_norm() + 1.0;
        for (const auto& ev : eigenvalues(h))
            if (std::abs(ev.real()) <= 1e-9 * scale) return true;
        return false;
    };

    const auto dense_sweep = [&]() {
        double best = lo;
        const int pts = 4096;
        for (int i = 0; i < pts; ++i) {
            const double w =
                wmin * std::pow(wmax / wmin, static_cast<double>(i) / (pts - 1));
            best = std::max(best, transfer_sigma_max(a, b, c, w));
        }
        return best;
    };

    double lb = lo;
    double ub = 2.0 * lo;
    int doublings = 0;
    while (has_imag_axis_eig(ub)) {
        lb = ub;
        ub *= 2.0;
        if (++doublings > 60) return dense_sweep();
    }
    int iters = 0;
    while (ub - lb > rel_tol * lb) {
        const double mid = 0.5 * (lb + ub);
        if (has_imag_axis_eig(mid))
            lb = mid;
        else
            ub = mid;
        if (++iters > 200) return dense_sweep();
    }
    return std::max(0.5 * (lb + ub), lo);
}

double find_root_increasing(const std::function<double(double)>& fn, double lo, double hi,
                            double tol) {
    if (!(lo < hi)) throw BadBracket("find_root_increasing: lo must be below hi");
    double flo = fn(lo);
    double fhi = fn(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw NonFinite("find_root_increasing: function not finite at the bracket");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0 || fhi < 0.0)
        throw BadBracket("find_root_increasing: fn(lo) < 0 < fn(hi) violated");
    double x = lo;
    for (int it = 0; it < 200; ++it) {
        // secant acceleration on even iterations, guaranteed-halving
        // bisection on odd ones so a steep root cannot stall the bracket
        const double width = hi - lo;
        double cand = 0.5 * (lo + hi);
        if (it % 2 == 0) {
            const double secant = lo - flo * width / (fhi - flo);
            if (secant > lo + 1e-3 * width && secant < hi - 1e-3 * width) cand = secant;
        }
        const double fc = fn(cand);
        if (!std::isfinite(fc)) throw NonFinite("find_root_increasing: function not finite");
        x = cand;
        if (std::abs(fc) <= tol) return x;
        if (fc < 0.0) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        if (hi - lo <= std::max(tol, 4.0 * kEps) * (1.0 + std::abs(x))) break;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct AdaptiveQuad {
    const std::function<double(double)>& fn;
    int max_depth = 48;

    double eval(double x) const {
        const double v = fn(x);
        if (!std::isfinite(v))
            throw NonFinite("integrate_adaptive: integrand evaluated to NaN or infinity");
        return v;
    }

    double run(double a, double fa, double b, double fb, double m, double fm, double whole,
               double tol, int depth) const {
        if (depth > max_depth)
            throw MaxDepth("integrate_adaptive: recursion depth limit reached");
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = eval(lm), frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        return run(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
               run(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
    }

    double integrate(double a, double b, double tol) const {
        const double m = 0.5 * (a + b);
        const double fa = eval(a), fb = eval(b), fm = eval(m);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return run(a, fa, b, fb, m, fm, whole, tol, 0);
    }
};

}  // namespace

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double tol) {
    if (!(a < b)) throw Error("integrate_adaptive: requires a < b");
    if (std::isinf(a) || std::isinf(b)) {
        // w = tan(u); dw = (1 + tan^2 u) du
        const auto g = [&fn](double u) {
            const double t = std::tan(u);
            return fn(t) * (1.0 + t * t);
        };
        const std::function<double(double)> gf = g;
        AdaptiveQuad q{gf};
        return q.integrate(std::atan(a), std::atan(b), tol);
    }
    AdaptiveQuad q{fn};
    return q.integrate(a, b, tol);
}

}  // namespace entbound
