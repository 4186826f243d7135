//! Rayon-backed embedding and per-seed walks. Results are bit-identical to
//! the sequential routines in the core crate.

use motif_forge_core::encoder::{Embedder, EncoderModel, OrderEmbedding, EMBED_CHUNK};
use motif_forge_core::miner::{aggregate_walks, draw_seeds, usable_seeds, Miner, MiningResult};
use motif_forge_core::{Graph, Result};
use rand::Rng;
use rayon::prelude::*;

/// Embeds chunks of graphs on the rayon pool.
#[derive(Clone, Copy)]
pub struct ParallelEmbedder<'a>(pub &'a EncoderModel);

impl Embedder for ParallelEmbedder<'_> {
    fn dim(&self) -> usize {
        self.0.config().dim
    }

    fn embed_batch(&self, graphs: &[Graph]) -> Result<Vec<OrderEmbedding>> {
        if graphs.len() <= EMBED_CHUNK {
            return self.0.embed_batch(graphs);
        }
        let parts: Vec<Vec<OrderEmbedding>> =
            graphs.par_chunks(EMBED_CHUNK).map(|c| self.0.embed_batch(c)).collect::<Result<_>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
}

pub fn mine_greedy<E: Embedder + Sync + ?Sized, R: Rng + ?Sized>(
    miner: Miner<'_, E>,
    k: usize,
    seeds: usize,
    rng: &mut R,
) -> Result<MiningResult> {
    check_k(k)?;
    let seeds = usable_seeds(miner.target, &draw_seeds(miner.target, seeds, rng), k)?;
    let walks: Vec<_> = seeds.par_iter().map(|&s| miner.greedy_walk(s, k)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate_walks(&walks.into_iter().flatten().collect::<Vec<_>>()))
}

pub fn mine_beam<E: Embedder + Sync + ?Sized, R: Rng + ?Sized>(
    miner: Miner<'_, E>,
    k: usize,
    width: usize,
    seeds: usize,
    rng: &mut R,
) -> Result<MiningResult> {
    check_k(k)?;
    let seeds = usable_seeds(miner.target, &draw_seeds(miner.target, seeds, rng), k)?;
    let walks: Vec<_> = seeds.par_iter().map(|&s| miner.beam_walk(s, k, width)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate_walks(&walks.into_iter().flatten().collect::<Vec<_>>()))
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(motif_forge_core::Error::InvalidArgument("motif size must be at least 2".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use motif_forge_core::encoder::EncoderConfig;
    use motif_forge_core::miner::{self, build_index};
    use motif_forge_core::rng::seeded;
    use motif_forge_core::synth::{Family, GeneratorConfig};

    #[test]
    fn parallel_matches_sequential() {
        let config = EncoderConfig { hidden: 8, layers: 3, mlp_layers: 2, dim: 6 };
        let model = EncoderModel::new(config, 3).unwrap();
        let graphs = GeneratorConfig::new(Family::Mixed, (6, 12), 4).unwrap().dataset(150).unwrap();
        let anchored: Vec<Graph> = graphs.iter().map(|g| g.clone().with_anchor(0).unwrap()).collect();
        assert_eq!(ParallelEmbedder(&model).embed_batch(&anchored).unwrap(), model.embed_batch(&anchored).unwrap());
        let target = Graph::disjoint_union(&graphs[..20]).0;
        let index = build_index(&target, &ParallelEmbedder(&model), 30, (4, 8), &mut seeded(1)).unwrap();
        let par = ParallelEmbedder(&model);
        let a = mine_greedy(Miner::new(&target, &par, &index), 4, 25, &mut seeded(2)).unwrap();
        let b = miner::mine_greedy(Miner::new(&target, &model, &index), 4, 25, &mut seeded(2)).unwrap();
        assert_eq!(a, b);
        let a = mine_beam(Miner::new(&target, &par, &index), 4, 3, 25, &mut seeded(2)).unwrap();
        let b = miner::mine_beam(Miner::new(&target, &model, &index), 4, 3, 25, &mut seeded(2)).unwrap();
        assert_eq!(a, b);
    }
}
