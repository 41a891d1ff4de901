#pragma once

namespace fringe {

// Arithmetic charged to the per-pixel cost model.
struct OpCounts {
  long long arctan = 0;
  long long mod = 0;
  long long addsub = 0;
  long long muldiv = 0;
  long long cmp = 0;

  OpCounts& operator+=(const OpCounts& o) {
    arctan += o.arctan;
    mod += o.mod;
    addsub += o.addsub;
    muldiv += o.muldiv;
    cmp += o.cmp;
    return *this;
  }
  bool operator==(const OpCounts& o) const {
    return arctan == o.arctan && mod == o.mod && addsub == o.addsub &&
           muldiv == o.muldiv && cmp == o.cmp;
  }
};

// Recording policy: kernels call these at their charge points.
struct Tally {
  OpCounts counts;
  void arctan(long long n = 1) { counts.arctan += n; }
  void mod(long long n = 1) { counts.mod += n; }
  void addsub(long long n = 1) { counts.addsub += n; }
  void muldiv(long long n = 1) { counts.muldiv += n; }
  void cmp(long long n = 1) { counts.cmp += n; }
};

// Zero-cost policy for production paths; everything inlines away.
struct NoTally {
  void arctan(long long = 1) {}
  void mod(long long = 1) {}
  void addsub(long long = 1) {}
  void muldiv(long long = 1) {}
  void cmp(long long = 1) {}
};

}  // namespace fringe
