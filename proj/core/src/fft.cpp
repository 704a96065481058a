#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "elastoborn/parallel.hpp"

namespace elastoborn::detail {

namespace {

std::mutex plan_mutex;

struct LinePlans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Plans are cached per length and reused for every line through the
// new-array interface, on buffers allocated with fftw_malloc.
const LinePlans& plans_for(int n) {
    static std::map<int, LinePlans> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    LinePlans p;
    p.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    return cache.emplace(n, p).first->second;
}

}  // namespace

void fft1_axis(std::vector<cplx>& data, int N, int axis, bool inverse) {
    const LinePlans& p = plans_for(N);
    fftw_plan plan = inverse ? p.bwd : p.fwd;
    const std::size_t NN = std::size_t(N) * N;
    const std::size_t stride = axis == 0 ? NN : (axis == 1 ? std::size_t(N) : 1);
    parallel_for(NN, [&](std::size_t begin, std::size_t end) {
        auto* buf = fftw_alloc_complex(N);
        for (std::size_t line = begin; line < end; ++line) {
            std::size_t a = line / N, b = line % N, base;
            if (axis == 0) base = a * N + b;
            else if (axis == 1) base = a * NN + b;
            else base = (a * N + b) * N;
            for (int i = 0; i < N; ++i) {
                const cplx& z = data[base + i * stride];
                buf[i][0] = z.real();
                buf[i][1] = z.imag();
            }
            fftw_execute_dft(plan, buf, buf);
            for (int i = 0; i < N; ++i) data[base + i * stride] = cplx(buf[i][0], buf[i][1]);
        }
        fftw_free(buf);
    });
}

void fft1_axis_line(std::vector<cplx>& line, bool inverse) {
    const int N = int(line.size());
    const LinePlans& p = plans_for(N);
    struct Buffers {
        std::vector<std::pair<int, fftw_complex*>> v;
        ~Buffers() {
            for (auto& b : v) fftw_free(b.second);
        }
    };
    thread_local Buffers bufs;
    fftw_complex* buf = nullptr;
    for (auto& b : bufs.v)
        if (b.first == N) buf = b.second;
    if (!buf) {
        buf = fftw_alloc_complex(N);
        bufs.v.emplace_back(N, buf);
    }
    for (int i = 0; i < N; ++i) {
        buf[i][0] = line[i].real();
        buf[i][1] = line[i].imag();
    }
    fftw_execute_dft(inverse ? p.bwd : p.fwd, buf, buf);
    for (int i = 0; i < N; ++i) line[i] = cplx(buf[i][0], buf[i][1]);
}

void fft3(std::vector<cplx>& data, int N, bool inverse) {
    for (int a = 0; a < 3; ++a) fft1_axis(data, N, a, inverse);
}

std::vector<cplx> to_complex(const ScalarField& f) {
    std::vector<cplx> c(f.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.v[i];
    return c;
}

void from_complex(const std::vector<cplx>& c, ScalarField& out, double scale) {
    for (std::size_t i = 0; i < c.size(); ++i) out.v[i] = c[i].real() * scale;
}

}  // namespace elastoborn::detail
