#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mpsrg {

using Complex = std::complex<double>;

/// Dense complex matrix with row-major storage. Entries are checked to be
/// finite on construction; instances are immutable by convention once built
/// (all library operations return new values).
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    /// rows x cols zero matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);

    /// From explicit row-major entries; throws InvalidInput on size mismatch
    /// or non-finite entries.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    /// Brace-for-brace construction: ComplexMatrix::from_rows({{1,0},{0,1}}).
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    Complex operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    Complex& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

    const std::vector<Complex>& entries() const { return entries_; }

    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    ComplexMatrix adjoint() const;

    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// Column j as a flat vector.
    std::vector<Complex> column(std::size_t j) const;
    /// Row i as a flat vector.
    std::vector<Complex> row(std::size_t i) const;

    /// Entry-wise checks used by invariants and tests.
    bool is_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;

    void check_finite() const;
};

/// Matrix product; throws InvalidInput on inner-dimension mismatch.
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker (tensor) product: entry ((i,k),(j,l)) = a(i,j) * b(k,l), with row
/// index i*b.rows()+k and column index j*b.cols()+l.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Matrix-vector product.
std::vector<Complex> apply(const ComplexMatrix& m, const std::vector<Complex>& v);

/// Hermitian inner product <a|b> = sum conj(a_i) b_i.
Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// Euclidean norm of a complex vector.
double norm(const std::vector<Complex>& v);

/// Frobenius distance ||a - b||.
double distance(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace mpsrg
