#pragma once

#include "frri/dataset.hpp"
#include "frri/evaluation.hpp"
#include "frri/fuzzy.hpp"
#include "frri/induction.hpp"
#include "frri/inference.hpp"
#include "frri/model_io.hpp"
#include "frri/rules.hpp"
#include "frri/setcover.hpp"
