// Exercises the shared library through its C header only.
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "vlbridge/vlbridge.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path d = [] {
    auto p = fs::temp_directory_path() / ("vlb_capi_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

}  // namespace

TEST(CApi, PipelineLifecycleAndHash) {
  vlb_pipeline* p = nullptr;
  ASSERT_EQ(vlb_pipeline_create(nullptr, &p), VLB_OK);
  ASSERT_NE(p, nullptr);
  EXPECT_STREQ(vlb_last_error(), "");
  char small[4];
  EXPECT_EQ(vlb_pipeline_config_hash(p, small, sizeof small), VLB_E_INVALID_ARGUMENT);
  char a[64], b[64];
  ASSERT_EQ(vlb_pipeline_config_hash(p, a, sizeof a), VLB_OK);
  ASSERT_EQ(vlb_pipeline_set_seed(p, 99), VLB_OK);
  ASSERT_EQ(vlb_pipeline_config_hash(p, b, sizeof b), VLB_OK);
  EXPECT_STRNE(a, b);
  EXPECT_EQ(vlb_pipeline_force_offline(p), VLB_OK);
  vlb_pipeline_destroy(p);
  vlb_pipeline_destroy(nullptr);
}

TEST(CApi, ConfigErrorsMapToStatusAndExitCode) {
  vlb_pipeline* p = reinterpret_cast<vlb_pipeline*>(0x1);
  const vlb_status st = vlb_pipeline_create(R"({"loss": {"beta": 1.2}})", &p);
  EXPECT_EQ(st, VLB_E_CONFIG);
  EXPECT_EQ(p, nullptr);
  EXPECT_NE(std::string(vlb_last_error()).find("loss.beta"), std::string::npos);
  EXPECT_EQ(vlb_exit_code(st), 2);
  EXPECT_EQ(vlb_pipeline_create("{not json", &p), VLB_E_CONFIG);
  EXPECT_EQ(vlb_pipeline_create_from_file((scratch() / "absent.json").c_str(), &p), VLB_E_CONFIG);
  EXPECT_EQ(vlb_exit_code(VLB_OK), 0);
  EXPECT_EQ(vlb_exit_code(VLB_E_CHECK_FAILED), 1);
  EXPECT_EQ(vlb_exit_code(VLB_E_IO), 1);
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(vlb_pipeline_create(nullptr, nullptr), VLB_E_INVALID_ARGUMENT);
  EXPECT_EQ(vlb_run_augment(nullptr, "a", "b"), VLB_E_INVALID_ARGUMENT);
  EXPECT_EQ(vlb_run_report(nullptr, 1, "out"), VLB_E_INVALID_ARGUMENT);
  EXPECT_EQ(vlb_cosine(nullptr, nullptr, 2, nullptr), VLB_E_INVALID_ARGUMENT);
  EXPECT_NE(std::string(vlb_last_error()).find("NULL"), std::string::npos);
}

TEST(CApi, Primitives) {
  const double a[] = {1, 1}, b[] = {1, 0}, z[] = {0, 0};
  double out = 0;
  ASSERT_EQ(vlb_cosine(a, b, 2, &out), VLB_OK);
  EXPECT_NEAR(out, 1 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(vlb_cosine(a, z, 2, &out), VLB_E_INVALID_ARGUMENT);

  ASSERT_EQ(vlb_rouge_l("the cat sat on the mat", "The cat lay on the mat.", &out), VLB_OK);
  EXPECT_NEAR(out, 5.0 / 6.0, 1e-12);
  EXPECT_EQ(vlb_rouge_l("", "x", &out), VLB_E_INVALID_ARGUMENT);

  size_t d = 99;
  ASSERT_EQ(vlb_tree_edit_distance("(A)", "(B)", &d), VLB_OK);
  EXPECT_EQ(d, 1U);
  EXPECT_EQ(vlb_tree_edit_distance("(S (NP a)", "(A)", &d), VLB_E_PARSE);

  ASSERT_EQ(vlb_loss_cl(1, 0, 0.5, 1, 0, &out), VLB_OK);
  EXPECT_NEAR(out, std::log(1 + std::exp(1.0)), 1e-12);
  ASSERT_EQ(vlb_loss_cl(1, 0, 0.5, 1, 1, &out), VLB_OK);
  EXPECT_NEAR(out, std::log(1 + std::exp(1.0)) - 1, 1e-12);
  EXPECT_EQ(vlb_loss_cl(1, 0, 1.5, 1, 1, &out), VLB_E_CONFIG);
}

TEST(CApi, RunsCommandsAndReportsErrors) {
  const auto data = scratch() / "d.jsonl";
  std::ofstream(data) << "{\"id\":\"a\",\"video_id\":\"v1\",\"text\":\"person opens the door\",\"video_embedding\":[1,0,0,0]}\n"
                      << "{\"id\":\"b\",\"video_id\":\"v2\",\"text\":\"a dog holds the ball\",\"video_embedding\":[0,1,0,0]}\n";
  vlb_pipeline* p = nullptr;
  ASSERT_EQ(vlb_pipeline_create(R"({"embedder": {"dim": 16}})", &p), VLB_OK);
  const auto aug = scratch() / "aug.jsonl", train = scratch() / "t.json", rep = scratch() / "r.txt";
  ASSERT_EQ(vlb_run_augment(p, data.c_str(), aug.c_str()), VLB_OK) << vlb_last_error();
  vlb_train_options o = vlb_train_options_default();
  EXPECT_LT(o.epochs, 0);
  o.epochs = 2;
  o.grad_check = 1;
  ASSERT_EQ(vlb_run_train(p, aug.c_str(), train.c_str(), &o), VLB_OK) << vlb_last_error();
  const char* inputs[] = {train.c_str()};
  ASSERT_EQ(vlb_run_report(inputs, 1, rep.c_str()), VLB_OK) << vlb_last_error();
  EXPECT_TRUE(fs::exists(rep.string() + ".csv"));
  EXPECT_EQ(vlb_run_report(inputs, 0, rep.c_str()), VLB_E_INVALID_ARGUMENT);
  EXPECT_EQ(vlb_run_augment(p, (scratch() / "none.jsonl").c_str(), aug.c_str()), VLB_E_IO);
  // Attribute ranking needs equal text and video widths.
  EXPECT_EQ(vlb_run_attributes(p, data.c_str(), (scratch() / "attr.jsonl").c_str()), VLB_E_INVALID_ARGUMENT);
  vlb_pipeline_destroy(p);
  fs::remove_all(scratch());
}
