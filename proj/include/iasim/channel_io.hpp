#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iasim/network.hpp"

namespace iasim {

class FileFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Channel container format, version 1 (little-endian throughout):
//   magic   "IACH"                          4 bytes
//   version u8 (= 1)
//   users, streams, subcarriers             u32 each
//   tx_antennas[users], rx_antennas[users]  u32 each
//   seed    u64
//   gen_len u32, generator tag bytes
//   entries: IEEE-754 double pairs (re, im) in (rx, tx, subcarrier, row, col)
//            order, rx-major.
// Readers reject unknown versions and report the byte offset of truncation.
namespace detail_io {

static_assert(std::endian::native == std::endian::little,
              "channel file i/o assumes a little-endian host");

inline constexpr char kMagic[4] = {'I', 'A', 'C', 'H'};
inline constexpr std::uint8_t kVersion = 1;

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void bytes(void* out, std::size_t n, const char* what) {
        in_.read(reinterpret_cast<char*>(out), (std::streamsize)n);
        if ((std::size_t)in_.gcount() != n)
            throw FileFormatError("channel file truncated at byte offset " +
                                  std::to_string(offset_ + (std::size_t)in_.gcount()) +
                                  " while reading " + what);
        offset_ += n;
    }
    template <class T>
    T scalar(const char* what) {
        T v;
        bytes(&v, sizeof(T), what);
        return v;
    }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

}  // namespace detail_io

inline void save_channels(const ChannelSet& set, std::ostream& out) {
    using namespace detail_io;
    out.write(kMagic, 4);
    const std::uint8_t ver = kVersion;
    out.write(reinterpret_cast<const char*>(&ver), 1);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    const NetworkDims& d = set.dims();
    u32((std::uint32_t)d.users);
    u32((std::uint32_t)d.streams);
    u32((std::uint32_t)d.subcarriers);
    for (int m : d.tx_antennas) u32((std::uint32_t)m);
    for (int n : d.rx_antennas) u32((std::uint32_t)n);
    const std::uint64_t seed = set.seed();
    out.write(reinterpret_cast<const char*>(&seed), 8);
    u32((std::uint32_t)set.generator().size());
    out.write(set.generator().data(), (std::streamsize)set.generator().size());
    for (int k = 0; k < d.users; ++k)
        for (int m = 0; m < d.users; ++m)
            for (int n = 0; n < d.subcarriers; ++n) {
                const CMatrix& h = set.at(k, m, n);
                for (std::size_t i = 0; i < h.rows(); ++i)
                    for (std::size_t j = 0; j < h.cols(); ++j) {
                        const double re = h(i, j).real(), im = h(i, j).imag();
                        out.write(reinterpret_cast<const char*>(&re), 8);
                        out.write(reinterpret_cast<const char*>(&im), 8);
                    }
            }
    if (!out) throw FileFormatError("channel file write failed");
}

inline void save_channels(const ChannelSet& set, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FileFormatError("cannot open '" + path + "' for writing");
    save_channels(set, f);
}

/// JSON manifest variant for small hand-written fixtures:
/// {"format":"iasim-channels","version":1,"users":K,"streams":S,
///  "subcarriers":N,"tx_antennas":[...],"rx_antennas":[...],"seed":0,
///  "generator":"...","entries":[[re,im],...]} with entries in the same
/// (rx, tx, subcarrier, row, col) order as the binary format.
inline ChannelSet load_channels_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "iasim-channels")
            throw FileFormatError("channel manifest: unexpected format tag");
        const int version = j.at("version").get<int>();
        if (version != 1)
            throw FileFormatError("channel manifest: unsupported version " +
                                  std::to_string(version));
        NetworkDims d;
        d.users = j.at("users").get<int>();
        d.streams = j.at("streams").get<int>();
        d.subcarriers = j.at("subcarriers").get<int>();
        d.tx_antennas = j.at("tx_antennas").get<std::vector<int>>();
        d.rx_antennas = j.at("rx_antennas").get<std::vector<int>>();
        d.validate();
        ChannelSet set(d, j.value("generator", std::string("file")),
                       j.value("seed", (std::uint64_t)0));
        const auto& e = j.at("entries");
        std::size_t want = 0;
        for (int k = 0; k < d.users; ++k)
            for (int m = 0; m < d.users; ++m)
                want += (std::size_t)d.rx_antennas[k] * d.tx_antennas[m] * d.subcarriers;
        if (e.size() != want)
            throw FileFormatError("channel manifest: expected " + std::to_string(want) +
                                  " entries, found " + std::to_string(e.size()));
        std::size_t idx = 0;
        for (int k = 0; k < d.users; ++k)
            for (int m = 0; m < d.users; ++m)
                for (int n = 0; n < d.subcarriers; ++n) {
                    CMatrix& h = set.at(k, m, n);
                    for (std::size_t i = 0; i < h.rows(); ++i)
                        for (std::size_t jj = 0; jj < h.cols(); ++jj) {
                            const auto& pair = e.at(idx++);
                            h(i, jj) = cplx{pair.at(0).get<double>(), pair.at(1).get<double>()};
                        }
                }
        if (!set.all_finite()) throw FileFormatError("channel manifest: non-finite entry");
        return set;
    } catch (const nlohmann::json::exception& ex) {
        throw FileFormatError(std::string("channel manifest: ") + ex.what());
    }
}

inline ChannelSet load_channels(std::istream& in) {
    using namespace detail_io;
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
        Reader r(in);
        const auto version = r.scalar<std::uint8_t>("version");
        if (version != kVersion)
            throw FileFormatError("channel file: unsupported version " +
                                  std::to_string((int)version));
        NetworkDims d;
        d.users = (int)r.scalar<std::uint32_t>("user count");
        d.streams = (int)r.scalar<std::uint32_t>("stream count");
        d.subcarriers = (int)r.scalar<std::uint32_t>("subcarrier count");
        if (d.users < 1 || d.users > 1024)
            throw FileFormatError("channel file: implausible user count");
        for (int k = 0; k < d.users; ++k)
            d.tx_antennas.push_back((int)r.scalar<std::uint32_t>("tx antenna count"));
        for (int k = 0; k < d.users; ++k)
            d.rx_antennas.push_back((int)r.scalar<std::uint32_t>("rx antenna count"));
        try {
            d.validate();
        } catch (const ConfigError& ex) {
            throw FileFormatError(std::string("channel file: inconsistent header: ") +
                                  ex.what());
        }
        const auto seed = r.scalar<std::uint64_t>("seed");
        const auto gen_len = r.scalar<std::uint32_t>("generator tag length");
        if (gen_len > 4096) throw FileFormatError("channel file: implausible tag length");
        std::string gen(gen_len, '\0');
        if (gen_len) r.bytes(gen.data(), gen_len, "generator tag");
        ChannelSet set(d, gen, seed);
        for (int k = 0; k < d.users; ++k)
            for (int m = 0; m < d.users; ++m)
                for (int n = 0; n < d.subcarriers; ++n) {
                    CMatrix& h = set.at(k, m, n);
                    for (std::size_t i = 0; i < h.rows(); ++i)
                        for (std::size_t j = 0; j < h.cols(); ++j) {
                            const double re = r.scalar<double>("matrix entry");
                            const double im = r.scalar<double>("matrix entry");
                            h(i, j) = cplx{re, im};
                        }
                }
        if (!set.all_finite()) throw FileFormatError("channel file: non-finite entry");
        return set;
    }
    // Not the binary magic: try the JSON manifest form.
    in.clear();
    in.seekg(0);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw FileFormatError(std::string("channel file: neither IACH binary nor JSON: ") +
                              ex.what());
    }
    return load_channels_json(j);
}

inline ChannelSet load_channels(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileFormatError("cannot open '" + path + "' for reading");
    return load_channels(f);
}

}  // namespace iasim
