fn main() {
    mds_atlas_cli::main_exit()
}
