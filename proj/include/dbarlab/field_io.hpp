#pragma once

#include <filesystem>
#include <string>

#include "dbarlab/form_field.hpp"

namespace dbarlab {

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`. Parent directories are created.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with columns i_x1, i_y1[, i_x2, i_y2], re_0, im_0, ... (one row per point).
std::string field_to_csv(const FormField& f);
void write_field_csv(const FormField& f, const std::filesystem::path& path);

enum class BlobPrecision { complex64, complex128 };

/// One line of JSON ({"n","R","N","degree","dtype","components","points"})
/// followed by the little-endian component-major samples.
std::string field_to_blob(const FormField& f, BlobPrecision precision = BlobPrecision::complex128);
void write_field_blob(const FormField& f, const std::filesystem::path& path,
                      BlobPrecision precision = BlobPrecision::complex128);
FormField read_field_blob(const std::filesystem::path& path);

}  // namespace dbarlab
