#pragma once

#include <string>

#include "fracdiff/march.hpp"

namespace fracdiff::io {

/// Container layout:
///   8 bytes   magic "FDTRAJ01"
///   8 bytes   header length n (uint64, little endian)
///   n bytes   JSON header (sorted keys): a, T, k, Nx, L, alpha, sigma, Lambda,
///             kernel_mode, kernel, forcing, w0, format_version, residuals, iterations
///   (k+1)*Nx  float64 little endian, row-major (row j = w_j)
inline constexpr int kFormatVersion = 1;

std::string encode_trajectory(const march::Trajectory& traj);
march::Trajectory decode_trajectory(const std::string& bytes);

void save_trajectory(const march::Trajectory& traj, const std::string& path);
/// Throws FormatError on truncated or inconsistent files.
march::Trajectory load_trajectory(const std::string& path);

/// Columns j,t,m,x,w preceded by a version comment line.
void write_csv(const march::Trajectory& traj, const std::string& path);

}  // namespace fracdiff::io
