#include "vlbridge/vlbridge.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "vlbridge/bridge.hpp"
#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/metrics.hpp"
#include "vlbridge/pipeline.hpp"

struct vlb_pipeline {
  vlb::PipelineConfig config;
};

namespace {

thread_local std::string g_last_error;

vlb_status status_of(vlb::ErrorCode code) {
  switch (code) {
    case vlb::ErrorCode::kInvalidArgument: return VLB_E_INVALID_ARGUMENT;
    case vlb::ErrorCode::kConfig: return VLB_E_CONFIG;
    case vlb::ErrorCode::kIo: return VLB_E_IO;
    case vlb::ErrorCode::kParse: return VLB_E_PARSE;
    case vlb::ErrorCode::kRemote: return VLB_E_REMOTE;
    case vlb::ErrorCode::kDegenerate: return VLB_E_DEGENERATE;
    case vlb::ErrorCode::kCheckFailed: return VLB_E_CHECK_FAILED;
    case vlb::ErrorCode::kRuntime: return VLB_E_RUNTIME;
  }
  return VLB_E_RUNTIME;
}

// Runs `fn`, translating every exception into a status and a thread-local
// message; nothing escapes the C boundary.
template <typename Fn>
vlb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VLB_OK;
  } catch (const vlb::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VLB_E_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return VLB_E_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) vlb::fail(vlb::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* vlb_last_error(void) { return g_last_error.c_str(); }

int vlb_exit_code(vlb_status status) {
  if (status == VLB_OK) return 0;
  return status == VLB_E_CONFIG ? 2 : 1;
}

vlb_status vlb_pipeline_create(const char* config_json, vlb_pipeline** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    vlb::PipelineConfig cfg = config_json ? vlb::parse_config(config_json) : vlb::PipelineConfig{};
    cfg.validate();
    *out = new vlb_pipeline{std::move(cfg)};
  });
}

vlb_status vlb_pipeline_create_from_file(const char* path, vlb_pipeline** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = nullptr;
    *out = new vlb_pipeline{vlb::load_config(path)};
  });
}

void vlb_pipeline_destroy(vlb_pipeline* pipeline) { delete pipeline; }

vlb_status vlb_pipeline_set_seed(vlb_pipeline* pipeline, uint64_t seed) {
  return guarded([&] {
    require(pipeline, "pipeline");
    pipeline->config.seed = seed;
  });
}

vlb_status vlb_pipeline_force_offline(vlb_pipeline* pipeline) {
  return guarded([&] {
    require(pipeline, "pipeline");
    pipeline->config.force_offline();
  });
}

vlb_status vlb_pipeline_config_hash(const vlb_pipeline* pipeline, char* buffer, size_t capacity) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(buffer, "buffer");
    const std::string h = pipeline->config.hash();
    if (capacity < h.size() + 1) vlb::fail(vlb::ErrorCode::kInvalidArgument, "buffer too small for config hash");
    std::memcpy(buffer, h.c_str(), h.size() + 1);
  });
}

vlb_status vlb_run_augment(const vlb_pipeline* pipeline, const char* input, const char* output) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(input, "input");
    require(output, "output");
    vlb::cmd_augment(pipeline->config, input, output);
  });
}

vlb_status vlb_run_attributes(const vlb_pipeline* pipeline, const char* input, const char* output) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(input, "input");
    require(output, "output");
    vlb::cmd_attributes(pipeline->config, input, output);
  });
}

vlb_train_options vlb_train_options_default(void) { return {-1, -1.0, 0}; }

vlb_status vlb_run_train(const vlb_pipeline* pipeline, const char* input, const char* output,
                         const vlb_train_options* options) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(input, "input");
    require(output, "output");
    vlb::TrainOverrides o;
    if (options) {
      if (options->epochs >= 0) o.epochs = static_cast<std::size_t>(options->epochs);
      if (options->lr >= 0.0) o.lr = options->lr;
      o.grad_check = options->grad_check != 0;
    }
    vlb::cmd_train(pipeline->config, input, output, o);
  });
}

vlb_status vlb_run_report(const char* const* inputs, size_t n_inputs, const char* output) {
  return guarded([&] {
    require(output, "output");
    if (n_inputs > 0) require(inputs, "inputs");
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < n_inputs; ++i) {
      require(inputs[i], "input path");
      paths.emplace_back(inputs[i]);
    }
    vlb::cmd_report(paths, output);
  });
}

vlb_status vlb_cosine(const double* a, const double* b, size_t dim, double* out) {
  return guarded([&] {
    require(out, "out");
    if (dim > 0) {
      require(a, "a");
      require(b, "b");
    }
    *out = vlb::cosine_similarity({a, dim}, {b, dim});
  });
}

vlb_status vlb_rouge_l(const char* candidate, const char* reference, double* out) {
  return guarded([&] {
    require(candidate, "candidate");
    require(reference, "reference");
    require(out, "out");
    *out = vlb::rouge_l(vlb::tokenize_lenient(candidate), vlb::tokenize_lenient(reference));
  });
}

vlb_status vlb_tree_edit_distance(const char* a, const char* b, size_t* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = vlb::tree_edit_distance(vlb::parse_bracketed_tree(a), vlb::parse_bracketed_tree(b));
  });
}

vlb_status vlb_loss_cl(double cos_pos, double cos_neg, double beta, double tau, int positive_numerator,
                       double* out) {
  return guarded([&] {
    require(out, "out");
    vlb::LossConfig c;
    c.beta = beta;
    c.tau = tau;
    c.variant = positive_numerator ? vlb::LossVariant::kPositiveNumerator : vlb::LossVariant::kAsPrinted;
    c.validate();
    *out = vlb::loss_cl_from_cosines(cos_pos, cos_neg, c);
  });
}

}  // extern "C"
