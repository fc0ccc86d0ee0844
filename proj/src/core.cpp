#include "crimescope/core.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace crimescope::core {

void ComplexImage::validate(const char* what) const {
    if (data.rows() < 8 || data.cols() < 8)
        throw std::invalid_argument(std::string(what) + ": dimensions must be at least 8x8");
    if (!all_finite(data))
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void KSpace::validate(const char* what) const {
    if (data.rows() < 8 || data.cols() < 8)
        throw std::invalid_argument(std::string(what) + ": dimensions must be at least 8x8");
    if (!all_finite(data))
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void MultiCoilKSpace::validate() const {
    if (coils.empty())
        throw std::invalid_argument("MultiCoilKSpace: need at least one coil");
    const auto h = coils.front().rows(), w = coils.front().cols();
    for (const auto& c : coils) {
        if (c.rows() != h || c.cols() != w)
            throw std::invalid_argument("MultiCoilKSpace: coil shape mismatch");
        c.validate("MultiCoilKSpace coil");
    }
}

bool all_finite(const CArray& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const Complex v = a(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
    return true;
}

CArray roll(const CArray& a, Eigen::Index dr, Eigen::Index dc) {
    const Eigen::Index h = a.rows(), w = a.cols();
    CArray out(h, w);
    dr = ((dr % h) + h) % h;
    dc = ((dc % w) + w) % w;
    for (Eigen::Index j = 0; j < w; ++j) {
        const Eigen::Index jj = (j + dc) % w;
        for (Eigen::Index i = 0; i < h; ++i) out((i + dr) % h, jj) = a(i, j);
    }
    return out;
}

namespace {

// FFTW plans are cached per (rows, cols, sign). Plan creation is not
// thread-safe; execution via fftw_execute_dft on caller buffers is.
class PlanCache {
public:
    fftw_plan get(Eigen::Index rows, Eigen::Index cols, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        const Key key{rows, cols, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Eigen arrays are column-major; swapping the dims makes FFTW's
        // row-major transform act on the same memory correctly.
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(rows * cols));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_2d(static_cast<int>(cols), static_cast<int>(rows), buf, buf,
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    struct Key {
        Eigen::Index r, c;
        int sign;
        bool operator<(const Key& o) const {
            if (r != o.r) return r < o.r;
            if (c != o.c) return c < o.c;
            return sign < o.sign;
        }
    };
    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

CArray fft2_raw(const CArray& a, int sign) {
    CArray out(a.rows(), a.cols());
    CArray in = a;  // fftw_execute_dft may not alias input/output from different arrays
    fftw_plan p = plan_cache().get(a.rows(), a.cols(), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

void require_finite(const CArray& a, const char* what) {
    if (!all_finite(a)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

}  // namespace

CArray dft2_centered(const CArray& img) {
    require_finite(img, "dft2_centered");
    const Eigen::Index h = img.rows(), w = img.cols();
    // ifftshift -> FFT -> fftshift, unitary scaling
    CArray shifted = roll(img, -(h / 2), -(w / 2));
    CArray f = fft2_raw(shifted, FFTW_FORWARD);
    f = roll(f, h / 2, w / 2);
    f *= 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));
    return f;
}

CArray idft2_centered(const CArray& ksp) {
    require_finite(ksp, "idft2_centered");
    const Eigen::Index h = ksp.rows(), w = ksp.cols();
    CArray shifted = roll(ksp, -(h / 2), -(w / 2));
    CArray f = fft2_raw(shifted, FFTW_BACKWARD);
    f = roll(f, h / 2, w / 2);
    f *= 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));
    return f;
}

KSpace dft2_centered(const ComplexImage& img) { return KSpace{dft2_centered(img.data)}; }

ComplexImage idft2_centered(const KSpace& ksp) { return ComplexImage{idft2_centered(ksp.data)}; }

CArray zero_pad(const CArray& a, double factor) {
    if (!(factor >= 1.0)) throw std::invalid_argument("zero_pad: factor must be >= 1");
    const Eigen::Index h = a.rows(), w = a.cols();
    const auto ho = static_cast<Eigen::Index>(std::llround(h * factor));
    const auto wo = static_cast<Eigen::Index>(std::llround(w * factor));
    if (ho == h && wo == w) return a;
    CArray out = CArray::Zero(ho, wo);
    out.block((ho - h) / 2, (wo - w) / 2, h, w) = a;
    return out;
}

KSpace zero_pad_kspace(const KSpace& k, double factor) { return KSpace{zero_pad(k.data, factor)}; }

MultiCoilKSpace zero_pad_kspace(const MultiCoilKSpace& mck, double factor) {
    MultiCoilKSpace out;
    out.coils.reserve(mck.coils.size());
    for (const auto& c : mck.coils) out.coils.push_back(zero_pad_kspace(c, factor));
    return out;
}

CArray center_crop(const CArray& a, Eigen::Index target_rows, Eigen::Index target_cols) {
    if (target_rows > a.rows() || target_cols > a.cols())
        throw std::invalid_argument("center_crop: target larger than source");
    if (target_rows < 1 || target_cols < 1)
        throw std::invalid_argument("center_crop: target must be at least 1x1");
    return a.block((a.rows() - target_rows) / 2, (a.cols() - target_cols) / 2, target_rows,
                   target_cols);
}

KSpace center_crop(const KSpace& k, Eigen::Index target_rows, Eigen::Index target_cols) {
    return KSpace{center_crop(k.data, target_rows, target_cols)};
}

ComplexImage rss_combine(const std::vector<ComplexImage>& coil_images) {
    if (coil_images.empty()) throw std::invalid_argument("rss_combine: need at least one coil");
    const Eigen::Index h = coil_images.front().rows(), w = coil_images.front().cols();
    RArray acc = RArray::Zero(h, w);
    for (const auto& ci : coil_images) {
        if (ci.rows() != h || ci.cols() != w)
            throw std::invalid_argument("rss_combine: coil shape mismatch");
        require_finite(ci.data, "rss_combine");
        acc += ci.data.abs2();
    }
    CArray out(h, w);
    out.real() = acc.sqrt();
    out.imag().setZero();
    return ComplexImage{out};
}

}  // namespace crimescope::core
