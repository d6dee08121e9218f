#include <doctest.h>

#include <vector>

#include "gsim/kernels.hpp"
#include "gsim/rng.hpp"

using namespace gsim;

namespace {

std::vector<double> random_vec(RngStream& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
        x = rng.next_uniform(-1, 1);
    }
    return v;
}

// long-double accumulation, the independent numeric route
double slow_dot(const std::vector<double>& w, const std::vector<double>& x, std::size_t row,
                std::size_t cols) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < cols; ++k) {
        acc += static_cast<long double>(w[row * cols + k]) * x[k];
    }
    return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("matvec_bias against long-double reference") {
    RngStream rng(21);
    const std::size_t rows = 17, cols = 53;
    const auto w = random_vec(rng, rows * cols);
    const auto x = random_vec(rng, cols);
    const auto b = random_vec(rng, rows);
    std::vector<double> y(rows);
    kernels::matvec_bias(w, x, b, y, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        CHECK(y[i] == doctest::Approx(slow_dot(w, x, i, cols) + b[i]).epsilon(1e-12));
    }
}

TEST_CASE("matvec_transposed and rank1_accumulate small hand cases") {
    // W = [[1,2],[3,4]] row-major
    std::vector<double> w{1, 2, 3, 4};
    std::vector<double> d{10, 100};
    std::vector<double> y(2);
    kernels::matvec_transposed(w, d, y, 2, 2);
    CHECK(y[0] == 310.0);  // 1*10 + 3*100
    CHECK(y[1] == 420.0);  // 2*10 + 4*100

    std::vector<double> x{5, 7};
    kernels::rank1_accumulate(w, d, x, 0.1, 2, 2);
    CHECK(w[0] == doctest::Approx(1 + 0.1 * 10 * 5));
    CHECK(w[1] == doctest::Approx(2 + 0.1 * 10 * 7));
    CHECK(w[2] == doctest::Approx(3 + 0.1 * 100 * 5));
    CHECK(w[3] == doctest::Approx(4 + 0.1 * 100 * 7));

    std::vector<double> acc{1, 1};
    kernels::axpy(acc, d, 2.0);
    CHECK(acc[0] == 21.0);
    CHECK(acc[1] == 201.0);
}

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
    RngStream rng(22);
    // sizes straddling the parallel cutoff
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{8, 16},
                              {64, 1036},
                              {128, 256}}) {
        const auto w0 = random_vec(rng, rows * cols);
        const auto x = random_vec(rng, cols);
        const auto b = random_vec(rng, rows);
        const auto d = random_vec(rng, rows);

        std::vector<double> y_s(rows), y_p(rows);
        kernels::serial::matvec_bias(w0, x, b, y_s, rows, cols);
        kernels::matvec_bias(w0, x, b, y_p, rows, cols);
        CHECK(y_s == y_p);

        std::vector<double> t_s(cols), t_p(cols);
        kernels::serial::matvec_transposed(w0, d, t_s, rows, cols);
        kernels::matvec_transposed(w0, d, t_p, rows, cols);
        CHECK(t_s == t_p);

        auto w_s = w0, w_p = w0;
        kernels::serial::rank1_accumulate(w_s, d, x, 0.37, rows, cols);
        kernels::rank1_accumulate(w_p, d, x, 0.37, rows, cols);
        CHECK(w_s == w_p);

        auto a_s = random_vec(rng, rows * cols);
        auto a_p = a_s;
        const auto v = random_vec(rng, rows * cols);
        kernels::serial::axpy(a_s, v, -0.11);
        kernels::axpy(a_p, v, -0.11);
        CHECK(a_s == a_p);
    }
}
