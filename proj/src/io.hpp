#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "hybridir/error.hpp"

namespace hybridir::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::ifstream open_in(const std::filesystem::path& path, bool binary = false);
std::ofstream open_out(const std::filesystem::path& path, bool binary = false);

/// Calls `fn(line, line_number)` for every line; line numbers start at 1.
/// A trailing '\r' is stripped.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Split on a single character, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char sep);
/// Split on runs of ASCII whitespace.
std::vector<std::string_view> split_ws(std::string_view line);

class BinaryWriter {
   public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

    template <typename T>
    void put(T value) {
        static_assert(std::is_arithmetic_v<T>);
        bytes(&value, sizeof(T));
    }

    void str(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

   private:
    std::ostream& out_;
};

class BinaryReader {
   public:
    BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError(what_ + ": truncated file");
    }

    template <typename T>
    T get() {
        static_assert(std::is_arithmetic_v<T>);
        T value;
        bytes(&value, sizeof(T));
        return value;
    }

    std::string str() {
        auto n = get<std::uint32_t>();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    void expect_magic(std::string_view magic) {
        std::string got(magic.size(), '\0');
        in_.read(got.data(), static_cast<std::streamsize>(magic.size()));
        if (static_cast<std::size_t>(in_.gcount()) != magic.size() || got != magic) {
            throw FormatError(what_ + ": bad magic, expected \"" + std::string(magic) + "\"");
        }
    }

    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) throw FormatError(what_ + ": trailing bytes");
    }

   private:
    std::istream& in_;
    std::string what_;
};

/// Effective worker count: HYBRIDIR_THREADS if set (>= 1), else hardware
/// concurrency, never more than `cap`.
unsigned thread_count(unsigned cap = 0);

}  // namespace hybridir::io
