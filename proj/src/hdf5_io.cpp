#include <hdf5.h>

#include <cstring>
#include <vector>

#include "crimescope/pipelines.hpp"

namespace crimescope::pipelines {

using core::Complex;

namespace {

struct C64 {
    float r;
    float i;
};

hid_t complex64_memtype() {
    hid_t t = H5Tcreate(H5T_COMPOUND, sizeof(C64));
    H5Tinsert(t, "r", HOFFSET(C64, r), H5T_NATIVE_FLOAT);
    H5Tinsert(t, "i", HOFFSET(C64, i), H5T_NATIVE_FLOAT);
    return t;
}

struct HidCloser {
    hid_t id;
    herr_t (*close)(hid_t);
    ~HidCloser() {
        if (id >= 0) close(id);
    }
};

void silence_hdf5_errors() {
    static const bool done = [] {
        H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
        return true;
    }();
    (void)done;
}

bool looks_complex(hid_t dtype) {
    if (H5Tget_class(dtype) != H5T_COMPOUND) return false;
    if (H5Tget_nmembers(dtype) != 2) return false;
    bool has_r = false, has_i = false;
    for (unsigned m = 0; m < 2; ++m) {
        char* name = H5Tget_member_name(dtype, m);
        if (name) {
            if (std::strcmp(name, "r") == 0) has_r = true;
            if (std::strcmp(name, "i") == 0) has_i = true;
            H5free_memory(name);
        }
    }
    return has_r && has_i;
}

}  // namespace

void for_each_slice(const std::string& path, const std::function<void(RawCase&&)>& fn) {
    silence_hdf5_errors();

    hid_t file = H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
    if (file < 0) throw IngestError("cannot open HDF5 file: " + path);
    HidCloser fc{file, H5Fclose};

    if (H5Lexists(file, "kspace", H5P_DEFAULT) <= 0)
        throw IngestError(path + ": missing dataset 'kspace'");

    hid_t dset = H5Dopen2(file, "kspace", H5P_DEFAULT);
    if (dset < 0) throw IngestError(path + ": cannot open dataset 'kspace'");
    HidCloser dc{dset, H5Dclose};

    hid_t space = H5Dget_space(dset);
    HidCloser sc{space, H5Sclose};
    const int rank = H5Sget_simple_extent_ndims(space);
    if (rank != 4)
        throw IngestError(path + ": dataset 'kspace' must have rank 4 (slices, coils, H, W), got " +
                          std::to_string(rank));
    hsize_t dims[4];
    H5Sget_simple_extent_dims(space, dims, nullptr);
    const hsize_t slices = dims[0], coils = dims[1], h = dims[2], w = dims[3];
    if (coils < 1 || h < 1 || w < 1) throw IngestError(path + ": degenerate 'kspace' extents");

    hid_t dtype = H5Dget_type(dset);
    HidCloser tc{dtype, H5Tclose};
    if (!looks_complex(dtype))
        throw IngestError(path + ": dataset 'kspace' is not complex64 (compound fields r, i)");

    hid_t memtype = complex64_memtype();
    HidCloser mc{memtype, H5Tclose};

    std::vector<C64> buf(static_cast<std::size_t>(coils * h * w));
    for (hsize_t s = 0; s < slices; ++s) {
        const hsize_t start[4] = {s, 0, 0, 0};
        const hsize_t count[4] = {1, coils, h, w};
        H5Sselect_hyperslab(space, H5S_SELECT_SET, start, nullptr, count, nullptr);
        hid_t memspace = H5Screate_simple(4, count, nullptr);
        HidCloser msc{memspace, H5Sclose};
        if (H5Dread(dset, memtype, memspace, space, H5P_DEFAULT, buf.data()) < 0)
            throw IngestError(path + ": read failed at slice " + std::to_string(s));

        RawCase rc;
        rc.source_id = path + "#" + std::to_string(s);
        rc.mck.coils.resize(coils);
        for (hsize_t c = 0; c < coils; ++c) {
            core::CArray arr(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w));
            const std::size_t base = static_cast<std::size_t>(c * h * w);
            for (hsize_t i = 0; i < h; ++i)
                for (hsize_t j = 0; j < w; ++j) {
                    const C64 v = buf[base + static_cast<std::size_t>(i * w + j)];
                    arr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        Complex(v.r, v.i);
                }
            rc.mck.coils[c] = core::KSpace{std::move(arr)};
        }
        fn(std::move(rc));
    }
}

std::vector<RawCase> ingest_dataset(const std::string& path) {
    std::vector<RawCase> out;
    for_each_slice(path, [&](RawCase&& rc) { out.push_back(std::move(rc)); });
    return out;
}

void export_dataset(const std::string& path, const std::vector<RawCase>& cases) {
    silence_hdf5_errors();
    if (cases.empty()) throw std::invalid_argument("export_dataset: no cases");
    const auto coils = cases.front().mck.coil_count();
    const auto h = cases.front().mck.rows(), w = cases.front().mck.cols();
    for (const auto& rc : cases)
        if (rc.mck.coil_count() != coils || rc.mck.rows() != h || rc.mck.cols() != w)
            throw std::invalid_argument("export_dataset: inhomogeneous case shapes");

    hid_t file = H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT);
    if (file < 0) throw IngestError("cannot create HDF5 file: " + path);
    HidCloser fc{file, H5Fclose};

    const hsize_t dims[4] = {cases.size(), coils, static_cast<hsize_t>(h), static_cast<hsize_t>(w)};
    hid_t space = H5Screate_simple(4, dims, nullptr);
    HidCloser sc{space, H5Sclose};
    hid_t memtype = complex64_memtype();
    HidCloser mc{memtype, H5Tclose};

    hid_t dset = H5Dcreate2(file, "kspace", memtype, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT);
    if (dset < 0) throw IngestError("cannot create dataset 'kspace' in " + path);
    HidCloser dc{dset, H5Dclose};

    std::vector<C64> buf(cases.size() * coils * static_cast<std::size_t>(h * w));
    std::size_t idx = 0;
    for (const auto& rc : cases)
        for (std::size_t c = 0; c < coils; ++c) {
            const core::CArray& arr = rc.mck.coils[c].data;
            for (Eigen::Index i = 0; i < h; ++i)
                for (Eigen::Index j = 0; j < w; ++j)
                    buf[idx++] = {static_cast<float>(arr(i, j).real()),
                                  static_cast<float>(arr(i, j).imag())};
        }
    if (H5Dwrite(dset, memtype, H5S_ALL, H5S_ALL, H5P_DEFAULT, buf.data()) < 0)
        throw IngestError("write failed: " + path);
}

}  // namespace crimescope::pipelines
