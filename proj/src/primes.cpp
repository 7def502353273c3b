#include "gapline/primes.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <fmt/format.h>

namespace gapline {

uint64_t isqrt(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    r = std::min<uint64_t>(r, 0xFFFFFFFFull);
    while (r * r > n) --r;
    while (r < 0xFFFFFFFFull && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<uint32_t> odd_base_primes(uint64_t limit) {
    std::vector<uint32_t> primes;
    if (limit < 3) return primes;
    // composite[i] <-> 2i + 1
    std::vector<char> composite(limit / 2 + 1, 0);
    for (uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
        if (composite[i]) continue;
        const uint64_t p = 2 * i + 1;
        for (uint64_t j = p * p / 2; j <= limit / 2; j += p) composite[j] = 1;
    }
    for (uint64_t i = 1; 2 * i + 1 <= limit; ++i)
        if (!composite[i]) primes.push_back(static_cast<uint32_t>(2 * i + 1));
    return primes;
}

bool is_prime_trial(uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (uint64_t f = 3; f <= n / f; f += 2)
        if (n % f == 0) return false;
    return true;
}

uint64_t SieveSegment::bit_count(uint64_t lo, uint64_t hi) {
    const uint64_t first_odd = lo | 1;
    return hi > first_odd ? (hi - first_odd + 1) / 2 : 0;
}

SieveSegment::SieveSegment(uint64_t lo, uint64_t hi, std::vector<uint64_t> words)
    : lo_(lo), hi_(hi), first_odd_(lo | 1), words_(std::move(words)) {
    if (lo < 2 || hi < lo) throw std::invalid_argument(fmt::format("bad segment range [{}, {})", lo, hi));
    if (words_.size() != (bit_count(lo, hi) + 63) / 64)
        throw std::invalid_argument("segment word count does not match its range");
}

SieveSegment SieveSegment::sieve(uint64_t lo, uint64_t hi, std::span<const uint32_t> base) {
    const uint64_t nbits = bit_count(lo, hi);
    std::vector<uint64_t> words((nbits + 63) / 64, ~uint64_t{0});
    if (nbits % 64) words.back() = (uint64_t{1} << (nbits % 64)) - 1;

    const uint64_t first_odd = lo | 1;
    for (const uint32_t p32 : base) {
        const uint64_t p = p32;
        if (p * p >= hi) break;
        uint64_t start = std::max(p * p, (first_odd + p - 1) / p * p);
        if ((start & 1) == 0) start += p;
        for (uint64_t i = (start - first_odd) >> 1; i < nbits; i += p)
            words[i >> 6] &= ~(uint64_t{1} << (i & 63));
    }
    return SieveSegment(lo, hi, std::move(words));
}

bool SieveSegment::flag(uint64_t n) const {
    if (!contains(n)) throw std::out_of_range(fmt::format("{} outside sieve segment [{}, {})", n, lo_, hi_));
    return test(n);
}

uint64_t SieveSegment::count() const {
    uint64_t total = (lo_ <= 2 && hi_ > 2) ? 1 : 0;
    for (const uint64_t w : words_) total += static_cast<uint64_t>(std::popcount(w));
    return total;
}

PrimeWindow::PrimeWindow(const SieveSegment& segment, uint64_t anchor, uint64_t width)
    : segment_(&segment), anchor_(anchor), width_(width), floor_(anchor >= width ? anchor - width : 0) {
    if (anchor >= segment.hi())
        throw std::invalid_argument(fmt::format("window anchor {} beyond segment end {}", anchor, segment.hi()));
    // Below 2 nothing is prime, so the segment only has to reach down to 2.
    if (std::max<uint64_t>(floor_, 2) < segment.lo())
        throw std::invalid_argument(fmt::format("window [{}, {}] not covered by segment starting at {}", floor_,
                                                anchor, segment.lo()));
}

bool PrimeWindow::test(uint64_t n) const {
    if (!covers(n))
        throw std::out_of_range(fmt::format("{} outside prime window [{}, {}]", n, floor_, anchor_));
    return n >= 2 && segment_->test(n);
}

bool is_prime(uint64_t n, const PrimeWindow& window) { return window.test(n); }

unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void run_indexed(size_t count, unsigned threads, const std::function<void(size_t)>& task) {
    const size_t workers = std::min<size_t>(resolve_threads(threads), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

namespace detail {

void validate_range(uint64_t lo, uint64_t hi, const SieveOptions& opts) {
    if (lo < 2) throw std::invalid_argument(fmt::format("range start {} below 2", lo));
    if (hi <= lo) throw std::invalid_argument(fmt::format("inverted or empty range [{}, {})", lo, hi));
    if (hi - 1 > kMaxValue) throw std::invalid_argument("range exceeds 2^63 - 1");
    if (opts.segment_size < kMinSegmentSize)
        throw std::invalid_argument(
            fmt::format("segment size {} below minimum {}", opts.segment_size, kMinSegmentSize));
}

SieveSegment obtain_segment(uint64_t lo, uint64_t hi, std::span<const uint32_t> base, const SieveOptions& opts) {
    if (!opts.cache_dir) return SieveSegment::sieve(lo, hi, base);
    const auto path = *opts.cache_dir / fmt::format("sieve_{}_{}.bin", lo, hi);
    if (std::filesystem::exists(path)) {
        try {
            SieveSegment cached = load_segment(path);
            if (cached.lo() == lo && cached.hi() == hi) return cached;
        } catch (const std::exception&) {
            // Unreadable checkpoint: fall through and rebuild it.
        }
    }
    SieveSegment fresh = SieveSegment::sieve(lo, hi, base);
    std::filesystem::create_directories(*opts.cache_dir);
    const auto tmp = path.string() + fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
    save_segment(tmp, fresh);
    std::filesystem::rename(tmp, path);
    return fresh;
}

}  // namespace detail

std::vector<SieveSegment> sieve_range(uint64_t lo, uint64_t hi, const SieveOptions& opts) {
    return map_chunks<SieveSegment>(lo, hi, 0, opts,
                                    [](const SieveSegment& seg, uint64_t, uint64_t) { return seg; });
}

uint64_t prime_count(uint64_t x, const SieveOptions& opts) {
    if (x < 2) throw std::invalid_argument(fmt::format("prime_count needs x >= 2, got {}", x));
    if (x > kMaxValue) throw std::invalid_argument("x exceeds 2^63 - 1");
    const auto counts = map_chunks<uint64_t>(2, x + 1, 0, opts,
                                             [](const SieveSegment& seg, uint64_t, uint64_t) { return seg.count(); });
    uint64_t total = 0;
    for (const uint64_t c : counts) total += c;
    return total;
}

namespace {

constexpr char kMagic[8] = {'G', 'A', 'P', 'S', 'I', 'E', 'V', 'E'};
constexpr uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian host");
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) throw std::runtime_error("truncated sieve checkpoint");
    return value;
}

}  // namespace

void save_segment(const std::filesystem::path& path, const SieveSegment& segment) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put<uint32_t>(out, kFormatVersion);
    put<uint64_t>(out, segment.lo());
    put<uint64_t>(out, segment.hi());
    put<uint64_t>(out, segment.words().size());
    out.write(reinterpret_cast<const char*>(segment.words().data()),
              static_cast<std::streamsize>(segment.words().size_bytes()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

SieveSegment load_segment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error(path.string() + " is not a sieve checkpoint");
    if (const auto version = get<uint32_t>(in); version != kFormatVersion)
        throw std::runtime_error(fmt::format("unsupported checkpoint version {}", version));
    const auto lo = get<uint64_t>(in);
    const auto hi = get<uint64_t>(in);
    const auto n = get<uint64_t>(in);
    if (n > (uint64_t{1} << 40)) throw std::runtime_error("corrupt checkpoint word count");
    std::vector<uint64_t> words(n);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(n * sizeof(uint64_t)));
    if (!in) throw std::runtime_error("truncated sieve checkpoint");
    return SieveSegment(lo, hi, std::move(words));
}

}  // namespace gapline
