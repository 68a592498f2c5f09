fn main() {
    std::process::exit(unilab_cli::run(std::env::args_os()));
}
