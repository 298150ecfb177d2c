#pragma once

#include "mmcsetup/balance.hpp"
#include "mmcsetup/core_model.hpp"
#include "mmcsetup/ctmc_oracle.hpp"
#include "mmcsetup/des_sim.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/gf_solver.hpp"
#include "mmcsetup/joint_distribution.hpp"
#include "mmcsetup/matrix.hpp"
#include "mmcsetup/measures.hpp"
#include "mmcsetup/qbd_solver.hpp"
#include "mmcsetup/serialize.hpp"
#include "mmcsetup/sweep.hpp"
