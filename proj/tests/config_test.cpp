#include "panpose/config.hpp"
#include "panpose/errors.hpp"

#include <doctest.h>

using namespace panpose;

TEST_CASE("toml subset parsing") {
    const auto cfg = Config::parse_toml(R"(
# a comment
learning_rate = 0.0005   # trailing comment
epochs = 210
lr_decay_epochs = [170, 200]
masking_enabled = true
preset = "topdown"

[adam]
beta1 = 0.9
)");
    CHECK(cfg.at("learning_rate").as_number() == doctest::Approx(5e-4));
    CHECK(cfg.at("epochs").as_number() == 210);
    CHECK(cfg.at("lr_decay_epochs").as_array() == std::vector<double>{170, 200});
    CHECK(cfg.at("masking_enabled").as_bool());
    CHECK(cfg.at("preset").as_string() == "topdown");
    CHECK(cfg.at("adam.beta1").as_number() == doctest::Approx(0.9));
    CHECK(!cfg.has("missing"));
    CHECK_THROWS_AS(cfg.at("missing"), ParamError);
    CHECK_THROWS_AS(cfg.at("epochs").as_string(), ParamError);
}

TEST_CASE("toml subset rejects malformed lines") {
    CHECK_THROWS_AS(Config::parse_toml("just words\n"), ParseError);
    CHECK_THROWS_AS(Config::parse_toml("x = \"unterminated\n"), ParseError);
    CHECK_THROWS_AS(Config::parse_toml("x = [1, oops]\n"), ParseError);
    CHECK_THROWS_AS(Config::parse_toml("x = bareword\n"), ParseError);
}

TEST_CASE("json configs flatten to the same shape") {
    const auto cfg = Config::parse_json(R"({
      "learning_rate": 0.01,
      "masking_enabled": false,
      "adam": {"beta1": 0.9},
      "lr_decay_epochs": [10, 20]
    })");
    CHECK(cfg.at("learning_rate").as_number() == doctest::Approx(0.01));
    CHECK(!cfg.at("masking_enabled").as_bool());
    CHECK(cfg.at("adam.beta1").as_number() == doctest::Approx(0.9));
    CHECK(cfg.at("lr_decay_epochs").as_array().size() == 2);
}

TEST_CASE("train config from file with preset baseline") {
    const auto cfg = Config::parse_toml(R"(
preset = "topdown"
batch_size = 16
seed = 9
)");
    const auto train_cfg = train_config_from(cfg);
    CHECK(train_cfg.learning_rate == doctest::Approx(5e-4));  // from preset
    CHECK(train_cfg.batch_size == 16);                        // overridden
    CHECK(train_cfg.seed == 9);
    CHECK(train_cfg.warmup_iters == 500);
}

TEST_CASE("train config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(train_config_from(Config::parse_toml("learning_rte = 0.1\n")), ParamError);
    CHECK_THROWS_AS(train_config_from(Config::parse_toml("learning_rate = -1.0\n")), ParamError);
    CHECK_THROWS_AS(
        train_config_from(Config::parse_toml("epochs = 10\nlr_decay_epochs = [20]\n")),
        ParamError);
}

TEST_CASE("sigma configs") {
    CHECK(sigma_config_from(Config::parse_toml("sigma = 0.1\n"), 4).sigmas[3] ==
          doctest::Approx(0.1));
    const auto listed = sigma_config_from(Config::parse_toml("sigmas = [0.1, 0.2, 0.3]\n"), 3);
    CHECK(listed.sigmas[1] == doctest::Approx(0.2));
    const auto coco = sigma_config_from(Config::parse_toml("coco_mean = true\n"), 39);
    CHECK(coco.sigmas[0] == doctest::Approx(mean_coco_sigma()));

    CHECK_THROWS_AS(sigma_config_from(Config::parse_toml("sigmas = [0.1]\n"), 3), ParamError);
    CHECK_THROWS_AS(sigma_config_from(Config::parse_toml("sigma = 0.1\ncoco_mean = true\n"), 3),
                    ParamError);
    CHECK_THROWS_AS(sigma_config_from(Config::parse_toml("# nothing\n"), 3), ParamError);
    CHECK_THROWS_AS(sigma_config_from(Config::parse_toml("sigma = -0.5\n"), 3), ParamError);
}
