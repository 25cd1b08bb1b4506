#include "helpers.hpp"

#include "awarekit/error.hpp"
#include "awarekit/generator.hpp"

#include <doctest.h>

using namespace awarekit;
using awarekit::testing::random_tensor;
using awarekit::testing::small_planted;

namespace {

GeneratorSpec tiny_spec() {
  GeneratorSpec s;
  s.num_classes = 3;
  s.latent_dim = 4;
  s.embedding_dim = 3;
  s.initial_channels = 6;
  s.blocks = {{6, 5}, {5, 4}};
  return s;
}

Generator random_generator(std::uint64_t seed) {
  const GeneratorSpec s = tiny_spec();
  GeneratorWeights w = GeneratorWeights::zeros(s);
  auto fill = [&](Tensor& t, float scale) { t = random_tensor(t.shape(), seed++, scale); };
  auto fillv = [&](Eigen::VectorXf& v, float scale) { v = random_tensor({v.size()}, seed++, scale).data(); };
  fill(w.embedding, 1.0f);
  fill(w.stem_weight, 0.5f);
  fillv(w.stem_bias, 0.1f);
  for (auto& b : w.blocks) {
    fill(b.gamma_weight, 0.2f);
    fillv(b.gamma_bias, 0.1f);
    fill(b.beta_weight, 0.5f);
    fillv(b.beta_bias, 0.3f);
    fill(b.conv_weight, 0.3f);
    fillv(b.conv_bias, 0.1f);
  }
  fill(w.output_weight, 0.3f);
  fillv(w.output_bias, 0.1f);
  return Generator(s, std::move(w));
}

ConditioningInput cond(Index class_id = 1, std::uint64_t seed = 7) { return {sample_latent(4, seed, 0), class_id}; }

}  // namespace

TEST_CASE("spec validation names the broken invariant") {
  GeneratorSpec s = tiny_spec();
  CHECK_NOTHROW(s.validate());
  s.blocks[1].in_channels = 9;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("previous output channels"), ShapeError);
  s = tiny_spec();
  s.num_classes = 1;
  CHECK_THROWS_AS(s.validate(), ShapeError);
  CHECK(tiny_spec().output_resolution() == 16);
  CHECK(tiny_spec().total_channels() == 11);
}

TEST_CASE("zero gamma weights give unit gamma and constant beta bias") {
  const GeneratorSpec s = tiny_spec();
  GeneratorWeights w = GeneratorWeights::zeros(s);
  w.blocks[0].beta_bias.setConstant(0.75f);
  const Generator g(s, std::move(w));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Modulation m = compute_modulation(g, cond(0, seed), 0);
    CHECK(m.gamma.isOnes(0.0f));
    CHECK(m.beta.isConstant(0.75f, 0.0f));
  }
}

TEST_CASE("ccbn applies the per-channel affine map") {
  const Tensor x = Tensor::constant({1, 1, 1}, 0.5f);
  const Tensor y = activate(ccbn(x, Eigen::VectorXf::Constant(1, 2.0f), Eigen::VectorXf::Constant(1, -1.0f)),
                            Activation::relu);
  CHECK(y.data()[0] == 0.0f);
  const Tensor id = ccbn(x, Eigen::VectorXf::Ones(1), Eigen::VectorXf::Zero(1));
  CHECK(bit_equal(id, x));
}

TEST_CASE("rectified ccbn output is zero exactly below the probe") {
  const Tensor x = random_tensor({8, 6, 6}, 11, 2.0f);
  Rng rng(12, Stream::test_noise);
  Eigen::VectorXf gamma(8), beta(8);
  for (Index c = 0; c < 8; ++c) {
    gamma[c] = static_cast<float>(0.1 + 2.0 * rng.uniform());
    beta[c] = static_cast<float>(-2.0 + 4.0 * rng.uniform());
  }
  const Tensor y = activate(ccbn(x, gamma, beta), Activation::relu);
  for (Index c = 0; c < 8; ++c) {
    const float t = channel_probe(gamma[c], beta[c]).t;
    for (Index i = 0; i < x.plane_size(); ++i) {
      const float xi = x.channel(c)[i];
      if (std::fabs(xi - t) < 1e-5f) continue;
      CHECK((y.channel(c)[i] == 0.0f) == (xi < t));
    }
  }
}

TEST_CASE("forward is deterministic and finite") {
  const Generator g = random_generator(100);
  const ForwardResult a = forward(g, cond());
  const ForwardResult b = forward(g, cond());
  CHECK(bit_equal(a.image, b.image));
  CHECK(a.image.shape() == std::vector<Index>{3, 16, 16});
  CHECK(a.image.all_finite());
  CHECK(a.image.data().cwiseAbs().maxCoeff() <= 1.0f);
  REQUIRE(a.trace.blocks.size() == 2);
  CHECK(a.trace.blocks[1].post_relu.shape() == std::vector<Index>{5, 8, 8});
}

TEST_CASE("resume_forward reproduces forward bit-exactly") {
  const Generator g = random_generator(200);
  InterventionPlan plan;
  plan.multiply(1, {0, 2}, 1.5f);
  const ForwardResult full = forward(g, cond(), plan);
  for (Index b = 0; b < 2; ++b) {
    CHECK(bit_equal(resume_forward(g, cond(), b, full.trace.blocks[static_cast<std::size_t>(b)].post_relu, plan),
                    full.image));
  }
  const Tensor conv = block_convolution(g, 0, full.trace.blocks[0].post_relu);
  CHECK(bit_equal(resume_from_convolution(g, cond(), 0, conv, plan), full.image));
  CHECK(bit_equal(conv, full.trace.blocks[1].pre_norm));
}

TEST_CASE("zeroing every channel of block 0 equals forwarding a zero feature") {
  const Generator g = random_generator(300);
  InterventionPlan plan;
  plan.zero(0, {0, 1, 2, 3, 4, 5});
  const Tensor edited = forward(g, cond(), plan).image;
  CHECK(bit_equal(edited, resume_forward(g, cond(), 0, Tensor({6, 4, 4}))));
}

TEST_CASE("self-substitution leaves the image unchanged") {
  const Generator g = random_generator(400);
  const ForwardResult base = forward(g, cond());
  InterventionPlan plan;
  plan.substitute(1, {0, 3, 4}, std::make_shared<Tensor>(base.trace.blocks[1].post_relu));
  CHECK(bit_equal(forward(g, cond(), plan).image, base.image));
}

TEST_CASE("neutral edits are identities and multiply by zero equals zero") {
  const Generator g = random_generator(500);
  const Tensor base = forward(g, cond()).image;
  CHECK(bit_equal(forward(g, cond(), InterventionPlan{}.multiply(0, {1}, 1.0f)).image, base));
  CHECK(bit_equal(forward(g, cond(), InterventionPlan{}.add(0, {1}, 0.0f)).image, base));
  CHECK(bit_equal(forward(g, cond(), InterventionPlan{}.multiply(0, {1}, 0.0f)).image,
                  forward(g, cond(), InterventionPlan{}.zero(0, {1})).image));
  CHECK(bit_equal(forward(g, cond(), InterventionPlan{}.zero(0, {1, 1})).image,
                  forward(g, cond(), InterventionPlan{}.zero(0, {1})).image));
}

TEST_CASE("invalid plans and conditioning are rejected with domain codes") {
  const Generator g = random_generator(600);
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  CHECK(code_of([&] { forward(g, cond(), InterventionPlan{}.zero(2, {0})); }) == "bad_block");
  CHECK(code_of([&] { forward(g, cond(), InterventionPlan{}.zero(1, {5})); }) == "bad_channel");
  CHECK(code_of([&] { forward(g, cond(3)); }) == "bad_class");
  CHECK(code_of([&] { forward(g, cond(-1)); }) == "bad_class");
  CHECK_THROWS_AS(forward(g, {Eigen::VectorXf::Zero(5), 0}), Error);
  CHECK_THROWS_AS(forward(g, cond(), InterventionPlan{}.substitute(0, {0}, std::make_shared<Tensor>(Tensor({6, 2, 2})))),
                  ShapeError);
}

TEST_CASE("class schedule switches conditioning per block") {
  const Generator g = random_generator(700);
  const std::vector<Index> all_two{2, 2};
  CHECK(bit_equal(forward(g, cond(0), {}, all_two).image, forward(g, cond(2)).image));
  const std::vector<Index> mixed{0, 2};
  const ForwardResult r = forward(g, cond(0), {}, mixed);
  CHECK(r.trace.blocks[0].class_id == 0);
  CHECK(r.trace.blocks[1].class_id == 2);
  const std::vector<Index> wrong{0};
  CHECK_THROWS(forward(g, cond(0), {}, wrong));
}

TEST_CASE("planted beta mean matches its closed form under Monte Carlo") {
  const auto& pm = small_planted();
  const Generator& g = pm.generator;
  const auto& shared = pm.truth.shared[0];
  REQUIRE(!shared.empty());
  const Index ch = shared.front();
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    sum += compute_modulation(g, ConditioningInput{sample_latent(g.spec().latent_dim, 3, static_cast<std::uint64_t>(i)), 0}, 0).beta[ch];
  }
  const double expected = -pm.truth.classes[0][0].mean_t[ch];
  CHECK(std::fabs(sum / n - expected) < 3.0 * 1.0 / 100.0);
}
