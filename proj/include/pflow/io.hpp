#pragma once

#include "pflow/ladder.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pflow::io {

// Persistence: run directories hold exactly one manifest (ordered
// `key = value` lines) plus CSV files with 17-significant-digit numbers,
// so identical reruns reproduce every byte.

std::string fmt(double x);  // %.17g

// Ordered key = value file. Keys are unique; set() replaces in place.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> items;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // BadRange when absent
    double get_num(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;  // comma separated
};

Manifest read_manifest(const std::string& path);
void write_manifest(const Manifest& m, const std::string& path);

// Cell field as CSV: header `x,y,value`, or `rho,value` on radial meshes.
void write_snapshot_csv(const Field& u, const std::string& path);
// Coordinates in the file must match the mesh (MeshMismatch otherwise).
Field read_snapshot_csv(const MeshPtr& mesh, const std::string& path, double t);

// Face field as CSV: header `face,value`, one row per face.
void write_face_csv(const FaceVector& z, const std::string& path);
FaceVector read_face_csv(const MeshPtr& mesh, const std::string& path);

// Shape strings: disk:R | square:L | rect:WxH | poly:x,y;x,y;... (disks at
// the origin, rectangles centered on it).
ConvexShape parse_shape(const std::string& s);
DomainSpec parse_domain(const std::string& s, double h, double s0 = -1.0);

// Write a trajectory run directory: manifest.txt, snapshot_###.csv, and
// (p = 1) z_###.csv. `domain_str` and `u0_desc` are recorded verbatim;
// extra[] lands at the end of the manifest.
void write_run(const Trajectory& traj, const std::string& dir, const std::string& domain_str,
               const std::string& u0_desc, const StepControls& ctl, int jobs,
               const std::vector<std::pair<std::string, std::string>>& extra = {});

struct RunData {
    Manifest manifest;
    MeshPtr mesh;
    Trajectory traj;
};

RunData read_run(const std::string& dir);

// Ladder run directory: manifest.txt, report.csv
// (level,time,L1_K,sup_K,diff_prev,violations), classification.txt, the
// top level's final field as limit.csv, and optionally barrier_fit.svg.
void write_ladder_report(const LadderReport& rep, const std::string& dir,
                         const std::string& domain_str, int jobs, bool svg_plot);

// Minimal standalone log-log scatter plot with a fitted slope line.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<double>& y, double slope,
                      const std::string& xlabel, const std::string& ylabel);

} // namespace pflow::io
